#include "hyperlab/forcing.hpp"
#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace hyperlab;
using namespace hyperlab::forcing;
using testsupport::error_name;

namespace {

Condition cond(const std::string& p, const std::string& q) { return parse_condition("p: " + p + "\nq: " + q); }
formula::Formula fm(const char* s) { return formula::parse(s); }

const char* kAlt = "rank=1 period=[{(0)},{(1)}]";  // <0> on evens, <1> on odds

IndexSet random_index_set(std::mt19937& rng) {
    std::uniform_int_distribution<int> len(0, 4), bit(0, 1);
    std::vector<bool> pre(len(rng)), per(1 + len(rng));
    for (auto&& b : pre) b = bit(rng);
    for (auto&& b : per) b = bit(rng);
    return IndexSet(pre, per);
}

}  // namespace

TEST_CASE("hereditarily finite sets") {
    // |V_{r+1}| = 2^|V_r|
    std::size_t size = 1;
    for (int r = 0; r <= 3; ++r) {
        CHECK(universe(r).size() == size);
        size = std::size_t{1} << size;
    }
    for (long n = 0; n < 6; ++n) {
        CHECK(HFSet::numeral(n).rank() == n);
        CHECK(HFSet::numeral(n).as_numeral() == n);
        CHECK(HFSet::numeral(n).size() == static_cast<std::size_t>(n));
    }
    HFSet a = HFSet::make({HFSet::numeral(1), HFSet(), HFSet::numeral(1)});
    CHECK(a == HFSet::numeral(2));
    for (const auto& x : universe(3)) CHECK(parse_hfset(to_string(x)) == x);
}

TEST_CASE("index sets agree with pointwise membership") {
    std::mt19937 rng(5);
    for (int t = 0; t < 200; ++t) {
        IndexSet a = random_index_set(rng), b = random_index_set(rng);
        IndexSet i = intersect(a, b), d = difference(a, b), u = unite(a, b);
        bool sub = true;  // prelude <= 4 and period lcm <= 60, so 120 indices settle it
        for (long k = 0; k < 120; ++k) {
            CHECK(i.contains(k) == (a.contains(k) && b.contains(k)));
            CHECK(d.contains(k) == (a.contains(k) && !b.contains(k)));
            CHECK(u.contains(k) == (a.contains(k) || b.contains(k)));
            if (a.contains(k) && !b.contains(k)) sub = false;
        }
        CHECK(subset(a, b) == sub);
        CHECK(parse_index_set(to_string(a)) == a);
        bool any = false;
        for (bool x : a.period_bits()) any = any || x;
        CHECK(a.unbounded() == any);
    }
}

TEST_CASE("index set navigation") {
    IndexSet ev = IndexSet::residue(2, 0);
    CHECK(ev.least() == 0);
    CHECK(ev.without(0).least() == 2);
    CHECK(ev.nth(5) == 10);
    CHECK(ev.count_below(7) == 4);
    CHECK(image(IndexSet::all(), ev) == ev);
    CHECK(image(ev, IndexSet::residue(2, 1)) == IndexSet::residue(4, 2));
}

TEST_CASE("the unit fiber and extension") {
    CHECK(one_point_one().rank() == 0);
    auto top = cond("all", "one");
    CHECK(extends(cond("evens", "rank=1 period=[{(0)}]"), top) == Tri::yes);
    CHECK(extends(cond("all", kAlt), top) == Tri::yes);
    CHECK(extends(cond("all", kAlt), cond("evens", kAlt)) == Tri::no);
    // one bad prelude index is tolerated
    CHECK(extends(cond("all", "rank=1 prelude=[{(1)}] period=[{(0)}]"), cond("all", "rank=1 period=[{(0)}]")) == Tri::yes);
    CHECK(extends(cond("all", "rank=1 period=[{(0)},{(1)}]"), cond("all", "rank=1 period=[{(0)}]")) == Tri::no);
    CHECK(error_name([] { (void)cond("prelude=1 period=0", "one"); }) == "bounded-index-set");
}

TEST_CASE("fiber transforms") {
    auto c = cond("all", "rank=2 period=[{(0,1)}]");
    auto pr = project(c.q, {1});
    CHECK(pr.rank() == 1);
    CHECK(pr.at(3) == make_value({{HFSet::numeral(1)}}));
    CHECK(to_string(restrict_rank(c.q, 2).at(0)) == to_string(c.q.at(0)));
    CHECK(error_name([&] { (void)project(c.q, {2}); }) == "index-out-of-range");

    // reindex an alternating fiber along evens -> N: every value lands on the even column
    auto alt = cond("all", kAlt).q;
    Reindexing g{IndexSet::all(), IndexSet::residue(2, 0)};
    auto r = reindex(alt, g);
    for (long i = 0; i < 12; ++i) CHECK(r.at(i) == alt.at(2 * i));

    auto am = amalgamate(alt, Reindexing{IndexSet::all(), IndexSet::residue(2, 1)});
    CHECK(am.rank() == 2);
    for (long i = 0; i < 12; ++i) {
        CHECK(project(am, {0}).at(i) == alt.at(i));
        CHECK(project(am, {1}).at(i) == alt.at(2 * i + 1));
    }
    CHECK(extends(Condition(IndexSet::all(), am), Condition(IndexSet::all(), alt)) == Tri::yes);
}

TEST_CASE("Los evaluation") {
    CHECK(forces_los(cond("all", "one"), fm("0 = 0")) == Tri::yes);
    CHECK(forces_los(cond("all", "rank=2 period=[{(0,1)}]"), fm("G0 in G1")) == Tri::yes);
    CHECK(forces_los(cond("evens", kAlt), fm("G0 = 0")) == Tri::yes);
    CHECK(forces_los(cond("all", kAlt), fm("G0 = 0")) == Tri::no);
    CHECK(forces_los(cond("all", kAlt), fm("A x. (x in G0 -> x = 0)")) == Tri::yes);
    CHECK(forces_los(cond("odds", kAlt), fm("E x. x in G0")) == Tri::yes);
    CHECK(error_name([] { (void)forces_los(cond("all", "one"), fm("G0 = 0")); }) == "rank-violation");
    CHECK(error_name([] { (void)forces_los(cond("all", kAlt), fm("st(G0)")); }) == "not-in-formula");
}

TEST_CASE("prelude edits leave Los verdicts alone") {
    auto q = cond("all", kAlt).q;
    for (const char* f : {"G0 = 0", "!(G0 = 0)", "0 in G0", "E x. x in G0"})
        for (const char* p : {"evens", "odds", "all"}) {
            auto base = forces_los(Condition(parse_index_set(p), q), fm(f));
            auto edited = parse_index_set(p).without(parse_index_set(p).least());
            CHECK(forces_los(Condition(edited, q), fm(f)) == base);
            CHECK(forces_los(Condition(unite(parse_index_set(p), IndexSet::from_bits("111", "0")), q), fm(f)) == base);
        }
}

TEST_CASE("clausal forcing over the small space") {
    auto space = enumerate_space(SpaceCaps{});
    CHECK(space.size() > 1000);
    CHECK(forces_clausal(cond("evens", kAlt), fm("st(G0)"), space) == Verdict::forced);
    CHECK(forces_clausal(cond("all", kAlt), fm("st(G0)"), space) == Verdict::unknown);
    CHECK(forces_clausal(cond("all", kAlt), fm("!st(G0)"), space) != Verdict::forced);
    CHECK(forces_clausal(cond("all", "one"), fm("!(0 in 0)"), space) == Verdict::forced);
    CHECK(forces_clausal(cond("all", "one"), fm("st(2)"), space) == Verdict::forced);
    CHECK(forces_clausal(cond("all", kAlt), fm("G0 = 0"), space) == Verdict::unknown);
    CHECK(forces_clausal(cond("all", kAlt), fm("G0 = 0 | G0 = 1"), space) == Verdict::forced);
}

TEST_CASE("naming constants") {
    auto n1 = fix_constant(cond("all", "one"), HFSet::numeral(1));
    CHECK(n1.m == 0);
    CHECK(n1.cond.q.rank() == 1);
    CHECK(forces_los(n1.cond, fm("G0 = 1")) == Tri::yes);
    auto n2 = fix_constant(n1.cond, HFSet::numeral(2));
    CHECK(n2.m == 1);
    CHECK(forces_los(n2.cond, fm("G0 = 1 & G1 = 2")) == Tri::yes);
    CHECK(extends(n2.cond, n1.cond) == Tri::yes);
}

TEST_CASE("the diagonal name avoids every numeral") {
    auto d = diag_name(cond("all", "one"));
    CHECK(d.m == 0);
    CHECK(extends(d.cond, cond("all", "one")) == Tri::yes);
    for (long n = 0; n <= 8; ++n) {
        // vN(i) = n only at i = n
        auto neq = formula::make_not(formula::parse("G0 = " + std::to_string(n)));
        CHECK(forces_los(d.cond, neq) == Tri::yes);
    }
}

TEST_CASE("deciding membership") {
    auto d = diag_name(cond("all", "one")).cond;
    auto out = decide_membership(d, 0, 16);
    CHECK(extends(out, d) == Tri::yes);
    CHECK(standard_part_name(out, 0, 16) == std::vector<int>(17, 1));

    auto alt = cond("all", kAlt);
    auto a = decide_membership(alt, 0, 0);
    CHECK(extends(a, alt) == Tri::yes);
    // the staircase keeps a finite stretch of the original p
    CHECK_FALSE(difference(a.p, IndexSet::residue(2, 1)).unbounded());
    CHECK(forces_los(a, fm("0 in G0")) == Tri::yes);

    auto c = cond("all", "rank=1 period=[{(1)}]");
    CHECK(standard_part_name(decide_membership(c, 0, 0), 0, 0) == std::vector<int>{1});
}

TEST_CASE("standard parts of constant names") {
    // {0, 2}
    auto c = cond("all", "rank=1 period=[{({0,2})}]");
    CHECK(standard_part_name(c, 0, 3) == std::vector<int>{1, 0, 1, 0});
    CHECK(standard_part_name(cond("all", "rank=1 period=[{(0)}]"), 0, 0) == std::vector<int>{0});
    CHECK(error_name([] { (void)standard_part_name(cond("all", kAlt), 0, 0); }) == "undecided");
}

TEST_CASE("pseudo-generic chains") {
    auto start = cond("all", "one");
    CHECK(pseudo_generic(start, {}).size() == 1);
    std::vector<DenseRule> rules{
        {"rank", [](const Condition& c) { return fix_constant(c, HFSet()).cond; }},
        {"evens", [](const Condition& c) { return Condition(intersect(c.p, IndexSet::residue(2, 0)), c.q); }}};
    auto chain = pseudo_generic(start, rules);
    CHECK(chain.size() == 3);
    CHECK(subset(chain.back().p, IndexSet::residue(2, 0)));

    auto base = diag_name(start).cond;
    std::vector<DenseRule> decide{{"0", [](const Condition& c) { return decide_membership(c, 0, 0); }},
                                  {"1", [](const Condition& c) { return decide_membership(c, 0, 1); }}};
    auto last = pseudo_generic(base, decide).back();
    CHECK(forces_los(last, fm("0 in G0")) == Tri::yes);
    CHECK(forces_los(last, fm("1 in G0")) == Tri::yes);

    std::vector<DenseRule> bad{{"grow", [](const Condition& c) { return Condition(IndexSet::all(), c.q); }}};
    CHECK(error_name([&] { (void)pseudo_generic(cond("evens", "one"), bad); }) == "contract-violation");
}

TEST_CASE("simplified forcing") {
    std::map<std::string, SimpleName> names{{"f", parse_simple_name("period=[0,1]")},
                                            {"g", SimpleName::constant(HFSet())}};
    CHECK(simplified_forces(IndexSet::residue(2, 0), fm("f = g"), names));
    CHECK_FALSE(simplified_forces(IndexSet::all(), fm("f = g"), names));
    CHECK(simplified_forces(IndexSet::all(), fm("st(g)"), names));
    CHECK_FALSE(simplified_forces(IndexSet::all(), fm("st(f)"), names));
    CHECK(simplified_forces(IndexSet::residue(2, 1), fm("st(f)"), names));
    CHECK(simplified_forces(IndexSet::residue(2, 1), fm("g in f"), names));
    auto s = parse_simple_name("prelude=[2] period=[0,1]");
    CHECK(to_string(parse_simple_name(to_string(s))) == to_string(s));
}

TEST_CASE("splitting a growing fiber") {
    auto one = cond("all", "rank=1 period=[{(vN(i))}]").q;
    auto r = split_fibers(one, IndexSet::all());
    CHECK(r.p1 == IndexSet::residue(2, 0));
    CHECK(r.p2 == IndexSet::residue(2, 1));
    CHECK(r.disjoint);
    for (std::size_t l = 0; l < 6; ++l) CHECK(r.n[l] == static_cast<long>(l));

    auto two = cond("all", "rank=1 period=[{(vN(i)),(vN(i+1))}]").q;
    auto s = split_fibers(two, IndexSet::all());
    CHECK(s.disjoint);
    CHECK(intersect(s.p1, s.p2) == IndexSet(std::vector<bool>{}, std::vector<bool>{false}));
    CHECK(s.p1.unbounded());
    CHECK(s.p2.unbounded());

    auto flat = cond("all", "rank=1 period=[{(0)}]").q;
    CHECK(error_name([&] { (void)split_fibers(flat, IndexSet::all()); }) == "unbounded-occurrence");
}
