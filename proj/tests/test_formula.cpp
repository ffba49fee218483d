#include "formula_harness.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace hyperlab;
using namespace hyperlab::formula;
using testsupport::error_name;

namespace {
const char* kDerivative = "Ain h. Ein k. (h != 0 -> (F(c+h)-F(c))/h = d+k)";
}

TEST_CASE("parsing builds the quantifier tree") {
    auto f = parse("Ain h. Ein k. (h != 0 -> P(h,k))");
    REQUIRE(f->kind == Node::Kind::quant);
    CHECK(f->q == QKind::all_in);
    CHECK(f->kids[0]->q == QKind::ex_in);
    auto g = parse("Ast m:posint. phi(m)");
    CHECK(g->q == QKind::all_st);
    CHECK(g->sort == Sort::posint);
    CHECK_THROWS_AS((void)parse("Ain h P(h)"), SyntaxError);
    CHECK_THROWS_AS((void)parse("P(h"), SyntaxError);
}

TEST_CASE("in-quantifiers bind reals only") {
    CHECK_THROWS_AS((void)parse("Ain h:posint. P(h)"), SyntaxError);
}

TEST_CASE("print and parse are inverse on the corpus") {
    auto lines = testsupport::corpus();
    CHECK(lines.size() >= 30);
    for (const auto& s : lines) {
        auto f = parse(s);
        CHECK(print(f) == s);
        CHECK(print(parse(print(f))) == print(f));
    }
}

TEST_CASE("delta-st classification") {
    auto a = classify_delta_st(parse("Ast m:posint. Est n:posint. P(m,n)"));
    CHECK(a.delta_st);
    CHECK(a.prefix == 2);
    auto b = classify_delta_st(parse("Ain h. Ein k. P(h,k)"));
    CHECK_FALSE(b.delta_st);
    CHECK_FALSE(b.reason.empty());
    auto c = classify_delta_st(parse("A x. E y. P(x,y)"));
    CHECK(c.delta_st);
    CHECK(c.prefix == 0);
    CHECK_FALSE(classify_delta_st(parse("Ast m:posint. st(x)")).delta_st);
}

TEST_CASE("the basic exchange and its dual") {
    auto r = rewrite_to_delta_st(parse("Ain h. Ein k. P(h,k)"));
    CHECK(alpha_equal(r.output, parse("Ast m:posint. Est n:posint. A x. (mag(x) < 1/n -> E y. (mag(y) < 1/m & P(x,y)))")));
    auto d = rewrite_to_delta_st(parse("Ein h. Ain k. P(h,k)"));
    CHECK(alpha_equal(d.output, parse("Est m:posint. Ast n:posint. E x. (mag(x) < 1/n & A y. (mag(y) < 1/m -> P(x,y)))")));
    CHECK(r.trace.front().rule == "expand-infinitesimal-def");
}

TEST_CASE("same-kind in-quantifiers share one st bound") {
    auto r = rewrite_to_delta_st(parse("Ein h. A y. Ein k. P(h,k,x,y)"));
    CHECK(alpha_equal(r.output, parse("Ast m:posint. E h. A y. E k. (mag(h) < 1/m & mag(k) < 1/m & P(h,k,x,y))")));
    bool merged = false;
    for (const auto& s : r.trace) merged = merged || s.rule == "st-quantifier-merge";
    CHECK(merged);
}

TEST_CASE("unsupported shapes fail with the offending quantifier") {
    auto f = parse("Ain h. Ein k. Ain l. R(h,k,l)");
    std::string what;
    try {
        (void)rewrite_to_delta_st(f);
    } catch (const DomainError& e) {
        CHECK(e.name() == "unsupported-shape");
        what = e.what();
    }
    CHECK(what.find("Ain l") != std::string::npos);
    CHECK(error_name([] { (void)rewrite_to_delta_st(parse("Est n:posint. Ain h. P(h,n)")); }) == "unsupported-shape");
}

TEST_CASE("traces chain and replay") {
    for (const auto& s : testsupport::corpus()) {
        auto r = rewrite_to_delta_st(parse(s));
        CHECK(replay(r.trace));
        for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(print(r.trace[i - 1].after) == print(r.trace[i].before));
        CHECK(classify_delta_st(r.output).delta_st);
    }
}

TEST_CASE("replay rejects a tampered trace") {
    auto r = rewrite_to_delta_st(parse("Ain h. Ein k. P(h,k)"));
    REQUIRE(r.trace.size() >= 2);
    auto bad = r.trace;
    bad[1].after = parse("A x. P(x,x)");
    CHECK_FALSE(replay(bad));
}

TEST_CASE("transfer collapse erases marks") {
    CHECK(alpha_equal(transfer_collapse(parse("Ast m:posint. Est n:posint. P(m,n)")), parse("A m:posint. E n:posint. P(m,n)")));
    auto plain = parse("A x. (P(x) -> Q(x))");
    CHECK(print(transfer_collapse(plain)) == print(plain));
    CHECK(error_name([] { (void)transfer_collapse(parse("Ain h. P(h)")); }) == "not-delta-st");
}

TEST_CASE("derivative formula collapses to the golden epsilon-delta form") {
    auto golden = parse(testsupport::read_lines(std::string(HYPERLAB_TEST_DATA) + "/epsilon_delta.golden").at(0));
    auto out = transfer_collapse(rewrite_to_delta_st(parse(kDerivative)).output);
    CHECK(alpha_equal(out, golden));
    CHECK(print(parse(kDerivative)) == kDerivative);
}

TEST_CASE("alpha equality") {
    CHECK(alpha_equal(parse("A x. P(x)"), parse("A y. P(y)")));
    CHECK_FALSE(alpha_equal(parse("A x. P(x)"), parse("E x. P(x)")));
    CHECK_FALSE(alpha_equal(parse("A x. P(x,y)"), parse("A y. P(y,y)")));
}

TEST_CASE("finite-grid semantics") {
    Grids g;
    g.infinitesimal = {LCNum::epsilon()};
    CHECK_FALSE(sample_semantics(parse("Ain h. h = 0"), g, {}));
    Grids s;
    s.standard = {1, 2, 3, 4};
    CHECK(sample_semantics(parse("Est n:posint. n > 3"), s, {}));
    CHECK(error_name([&] { (void)sample_semantics(parse("Est n:posint. P(n)"), s, {}); }) == "uninterpreted-symbol");
}

TEST_CASE("exchange pair agrees on five-point grids") {
    auto in = parse("Ain h. Ein k. P(h,k)");
    auto out = rewrite_to_delta_st(in).output;
    auto rep = testsupport::refute(in, out, 5);
    CHECK(rep.checks > 0);
    CHECK(rep.counterexamples.empty());
}
