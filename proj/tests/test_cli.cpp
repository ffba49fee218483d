#include "hyperlab/forcing.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdio>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
    int status;
    std::string out;
};

Run run(const std::string& args) {
    std::string cmd = std::string(HYPERLAB_CLI) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    for (std::size_t n; (n = fread(buf, 1, sizeof buf, pipe)) > 0;) out.append(buf, n);
    int st = pclose(pipe);
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

nlohmann::json structured(const std::string& args) {
    auto r = run("--format structured " + args);
    REQUIRE(r.status == 0);
    return nlohmann::json::parse(r.out);
}

}  // namespace

TEST_CASE("plain results") {
    auto r = run("deriv 'x^2' --at 3");
    CHECK(r.status == 0);
    CHECK(r.out == "6\n");
    CHECK(run("deriv 't^3' --at 2 --var t").out == "12\n");
}

TEST_CASE("exit statuses") {
    CHECK(run("force 'p: all; q: one' 'G3 = 0'").status == 1);
    CHECK(run("hyper '1/(eps-eps)'").status == 1);
    CHECK(run("rewrite 'Ain h P(h)'").status == 2);
    CHECK(run("deriv 'x^2'").status == 2);
    CHECK(run("").status == 2);
    CHECK(run("hyper eps --format xml").status == 2);
}

TEST_CASE("structured records") {
    auto h = structured("hyper '3 + eps'");
    CHECK(h["class"] == "limited_appreciable");
    CHECK(h["shadow"] == "3");

    auto w = structured("rewrite 'Ain h. Ein k. P(h,k)'");
    CHECK(w["trace"].is_array());
    CHECK(w["trace"].size() >= 3);
    CHECK(w["trace"][0].contains("rule"));
    CHECK(w["output"].get<std::string>().rfind("Ast m:posint.", 0) == 0);

    auto t = structured("thick --family 'contains(5)' --m-max 8");
    REQUIRE(t["nu"].size() == 9);
    for (const auto& row : t["nu"]) CHECK(row["nu"] == row["m"].get<long>() + 1);

    auto f = structured("force 'p: evens; q: rank=1 period=[{(0)},{(1)}]' 'G0 = 0'");
    CHECK(f["forces"] == "yes");

    auto d = structured("decide 'p: all; q: rank=1 period=[{(0)},{(1)}]' --m 0 --bound 3");
    CHECK(d["extends_input"] == "yes");
    CHECK(d["standard_part"] == "1000");

    auto e = run("--format structured force 'p: all; q: one' 'G3 = 0'");
    CHECK(e.status == 1);
    CHECK(nlohmann::json::parse(e.out)["error"] == "rank-violation");
}

TEST_CASE("every subcommand answers") {
    for (const char* args : {"integrate 'x^2' --a 0 --b 2", "integrate 'x^2' --a 0 --b 1 --mode numeric",
                             "tagged x --a 0 --b 1 --scheme right", "peano '2*x' --step 1/8 --x-max 1",
                             "measure '[0,1] + [2,3]'", "measure --geometric 5", "classify 'Ast m:posint. P(m)'",
                             "collapse --rewrite 'Ain h. Ein k. P(h,k)'", "split 'rank=1 period=[{(vN(i))}]'",
                             "generic 'p: all; q: one' --rule fix:0 --rule restrict:evens",
                             "thick --chain 'contains(0)' --chain 'contains(0) & contains(1)' --m-max 3",
                             "force 'p: evens; q: rank=1 period=[{(0)},{(1)}]' 'st(G0)' --mode clausal"}) {
        auto r = run(args);
        CHECK_MESSAGE(r.status == 0, args);
        CHECK_MESSAGE(!r.out.empty(), args);
    }
    CHECK(run("integrate 'x^2' --a 0 --b 2").out.rfind("value: 8/3", 0) == 0);
    CHECK(run("force 'p: evens; q: rank=1 period=[{(0)},{(1)}]' 'st(G0)' --mode clausal").out == "forced\n");
}

TEST_CASE("condition text is a fixed point of print and parse") {
    using namespace hyperlab::forcing;
    for (const char* s : {"p: all\nq: one", "p: prelude=10 period=01\nq: rank=1 period=[{(0)},{(1)}]",
                          "p: evens\nq: rank=2 prelude=[{(0,1),(1,0)}] period=[{(0,0)}]"}) {
        auto c = parse_condition(s);
        auto once = to_string(c);
        CHECK(to_string(parse_condition(once)) == once);
    }
}
