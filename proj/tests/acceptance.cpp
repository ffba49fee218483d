// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include "formula_harness.hpp"
#include "hyperlab/calculus.hpp"
#include "hyperlab/forcing.hpp"
#include "hyperlab/thick.hpp"
#include "support.hpp"
#include "thick_oracle.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <random>
#include <sstream>

using namespace hyperlab;
using namespace testsupport;
namespace fc = hyperlab::forcing;
namespace th = hyperlab::thick;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = true;
    std::string detail;
    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

// ---- 1: derivatives ----

Outcome derivatives() {
    Outcome o;
    auto t0 = Clock::now();
    std::mt19937 rng(20261016);
    int checks = 0;
    for (int t = 0; t < 25; ++t) {
        Coeffs c = random_poly(rng, 6);
        c.resize(7, 0);  // keep the degree bound explicit
        c[6] = random_rational(rng);
        Expr f = parse_expr(poly_text(c));
        for (int k = 0; k < 5; ++k) {
            Rational x = random_rational(rng);
            Rational got = derivative_at(f, x);
            ++checks;
            if (got != horner(differentiate(c), x)) o.fail("mismatch for " + poly_text(c) + " at " + to_string(x));
        }
    }
    double s = seconds_since(t0);
    if (s >= 5) o.fail("took " + std::to_string(s) + " s");
    if (o.pass) o.detail = std::to_string(checks) + " exact matches in " + std::to_string(s) + " s";
    return o;
}

// ---- 2: integrals ----

Outcome integrals() {
    Outcome o;
    std::mt19937 rng(7);
    int n = 0;
    for (int t = 0; t < 20; ++t) {
        Coeffs c = random_poly(rng, 6);
        Rational a = random_rational(rng), b = a + Rational(1 + t % 5, 1 + t % 3);
        Expr f = parse_expr(poly_text(c));
        Coeffs F = antiderivative(c);
        auto r = riemann_integral_symbolic(f, a, b);
        if (r.value != horner(F, b) - horner(F, a)) o.fail("integral of " + poly_text(c));
        for (auto s : {TagScheme::left, TagScheme::right, TagScheme::midpoint})
            if (!tagged_sum_check(f, a, b, s)) o.fail(std::string("tags ") + to_string(s) + " on " + poly_text(c));
        ++n;
    }
    if (o.pass) o.detail = std::to_string(n) + " intervals, 3 tag schemes each";
    return o;
}

// ---- 3: measure ----

Outcome measures() {
    Outcome o;
    std::mt19937 rng(3);
    for (int t = 0; t < 20; ++t) {
        Rational a = random_rational(rng), b = a + Rational(1 + t, 7);
        auto m = lebesgue_measures(IntervalUnion::make({{a, b}}));
        if (m.outer != b - a || m.inner != b - a) o.fail("[" + to_string(a) + "," + to_string(b) + "]");
    }
    for (int t = 0; t < 20; ++t) {
        // disjoint pieces with gaps; additivity against the single-interval values
        std::vector<Interval> pieces;
        Rational x = random_rational(rng), total = 0;
        for (int k = 0; k < 2 + t % 4; ++k) {
            Rational len = Rational(1 + (t * 7 + k) % 5, 3 + k);
            pieces.push_back({x, x + len});
            total += lebesgue_measures(IntervalUnion::make({{x, x + len}})).outer;
            x += len + Rational(1, 2 + k);
        }
        auto m = lebesgue_measures(IntervalUnion::make(pieces));
        if (m.outer != total || m.inner != total) o.fail("additivity on " + to_string(IntervalUnion::make(pieces)));
    }
    auto [fam, tail] = geometric_family(12);
    auto r = sigma_subadd_check(fam, tail, Rational(1, 1000000000));
    if (!r.passes) o.fail("subadditivity check failed");
    if (o.pass) o.detail = "20 intervals, 20 unions, subadditivity lhs " + to_string(r.lhs) + " <= rhs " + to_string(r.rhs);
    return o;
}

// ---- 4, 5: rewriting ----

Outcome rewriter_golden() {
    Outcome o;
    using namespace formula;
    auto golden = parse(read_lines(std::string(HYPERLAB_TEST_DATA) + "/epsilon_delta.golden").at(0));
    auto eq1 = parse("Ain h. Ein k. (h != 0 -> (F(c+h)-F(c))/h = d+k)");
    if (!alpha_equal(transfer_collapse(rewrite_to_delta_st(eq1).output), golden)) o.fail("derivative golden");

    const std::pair<const char*, const char*> pairs[] = {
        {"Ain h. Ein k. P(h,k)", "Ast m:posint. Est n:posint. A x. (mag(x) < 1/n -> E y. (mag(y) < 1/m & P(x,y)))"},
        {"Ein h. Ain k. P(h,k)", "Est m:posint. Ast n:posint. E x. (mag(x) < 1/n & A y. (mag(y) < 1/m -> P(x,y)))"}};
    for (const auto& [in, want] : pairs)
        if (!alpha_equal(rewrite_to_delta_st(parse(in)).output, parse(want))) o.fail(std::string("pair ") + in);

    int n = 0;
    for (const auto& s : corpus()) {
        auto f = parse(s);
        if (print(parse(print(f))) != print(f)) o.fail("round trip " + s);
        auto r = rewrite_to_delta_st(f);
        if (!classify_delta_st(r.output).delta_st) o.fail("not delta-st: " + print(r.output));
        if (!replay(r.trace)) o.fail("replay " + s);
        ++n;
    }
    if (n < 30) o.fail("corpus has only " + std::to_string(n) + " formulas");
    if (o.pass) o.detail = "golden, exchange pair and dual, " + std::to_string(n) + "-formula corpus replayed";
    return o;
}

Outcome rewriter_refutation() {
    Outcome o;
    long checks = 0, bad = 0;
    for (const auto& s : corpus()) {
        auto in = formula::parse(s);
        auto rep = refute(in, formula::rewrite_to_delta_st(in).output, 6);
        checks += rep.checks;
        bad += static_cast<long>(rep.counterexamples.size());
        if (!rep.counterexamples.empty()) o.fail(rep.counterexamples.front());
    }
    if (o.pass) o.detail = std::to_string(checks) + " grid/interpretation pairs, 0 counterexamples";
    else o.detail += " (" + std::to_string(bad) + " counterexamples)";
    return o;
}

// ---- 6: forcing equivalence ----

std::vector<std::string> atoms() {
    std::vector<std::string> out{"G0 = G1", "G0 in G1", "G1 in G0"};
    for (const char* g : {"G0", "G1"})
        for (int k = 0; k <= 2; ++k) {
            std::string n = std::to_string(k), G = g;
            out.push_back(G + " = " + n);
            out.push_back(G + " in " + n);
            out.push_back(n + " in " + G);
        }
    return out;
}

Outcome forcing_equivalence() {
    Outcome o;
    auto t0 = Clock::now();
    fc::Space space = fc::enumerate_space(fc::SpaceCaps{}, 3);
    long agree = 0, unknown = 0, mono_pairs = 0, edits = 0;

    std::vector<formula::Formula> fs;
    for (const auto& a : atoms()) {
        fs.push_back(formula::parse(a));
        fs.push_back(formula::make_not(fs.back()));
    }
    std::vector<std::vector<char>> forced(fs.size(), std::vector<char>(space.size(), 0));

    for (std::size_t c = 0; c < space.size(); ++c) {
        const auto& cond = space.at(c);
        for (std::size_t k = 0; k < fs.size(); ++k) {
            if (fc::max_name_index(fs[k]) >= cond.q.rank()) continue;
            auto v = space.decide(c, fs[k]);
            forced[k][c] = v == fc::Verdict::forced;
            if (v == fc::Verdict::unknown) {
                ++unknown;
                if (fc::forces_los(cond, fs[k]) == fc::Tri::yes) o.fail("Los forces but clausal is undecided");
                continue;
            }
            bool los = fc::forces_los(cond, fs[k]) == fc::Tri::yes;
            bool los_neg = fc::forces_los(cond, formula::make_not(fs[k])) == fc::Tri::yes;
            bool ok = v == fc::Verdict::forced ? los : los_neg && !los;
            if (!ok) o.fail("disagreement on " + formula::print(fs[k]) + " at\n" + fc::to_string(cond));
            ++agree;
        }
    }

    // A condition never forces both a formula and its negation.
    for (std::size_t k = 0; k < fs.size(); k += 2)
        for (std::size_t c = 0; c < space.size(); ++c)
            if (forced[k][c] && forced[k + 1][c]) o.fail("inconsistent at " + formula::print(fs[k]));

    // Forcing passes down to every extension.
    for (std::size_t c = 0; c < space.size(); ++c) {
        bool any = false;
        for (std::size_t k = 0; k < fs.size(); ++k) any = any || forced[k][c];
        if (!any) continue;
        for (std::size_t b : space.extensions(c)) {
            ++mono_pairs;
            for (std::size_t k = 0; k < fs.size(); ++k)
                if (forced[k][c] && !forced[k][b]) o.fail("monotonicity fails for " + formula::print(fs[k]));
        }
    }

    // Finite edits to p keep the Los verdicts.
    for (std::size_t c = 0; c < space.size(); c += 7) {
        const auto& cond = space.at(c);
        fc::Condition dropped(cond.p.without(cond.p.least()), cond.q);
        fc::Condition added(fc::unite(cond.p, fc::IndexSet::from_bits("1101", "0")), cond.q);
        for (const auto& f : fs) {
            if (fc::max_name_index(f) >= cond.q.rank()) continue;
            auto base = fc::forces_los(cond, f);
            ++edits;
            if (fc::forces_los(dropped, f) != base || fc::forces_los(added, f) != base)
                o.fail("prelude edit changes " + formula::print(f));
        }
    }

    double s = seconds_since(t0);
    if (s >= 60) o.fail("took " + std::to_string(s) + " s");
    std::ostringstream d;
    d << space.size() << " conditions, " << agree << " definite verdicts agree, " << unknown << " undecided, "
      << mono_pairs << " extension pairs, " << edits << " prelude edits, " << s << " s";
    if (o.pass) o.detail = d.str();
    else o.detail += " [" + d.str() + "]";
    return o;
}

// ---- 7: diagonalization ----

Outcome diagonalization() {
    Outcome o;
    auto C = [](const std::string& p, const std::string& q) { return fc::parse_condition("p: " + p + "\nq: " + q); };
    auto diag = fc::diag_name(C("all", "one")).cond;
    struct Case {
        fc::Condition c;
        int m;
    };
    std::vector<Case> battery{
        {diag, 0},
        {C("all", "rank=1 period=[{(0)},{(1)}]"), 0},
        {C("all", "rank=1 period=[{({0,2})}]"), 0},
        {C("all", "rank=2 period=[{(0,1)},{(1,2)}]"), 1},
        {C("evens", "rank=1 prelude=[{(3)}] period=[{(1),(2)}]"), 0},
        {C("all", "rank=1 period=[{(vN(i+1))}]"), 0},
        {C("all", "rank=1 period=[{(vN(i)),(0)}]"), 0},
        {fc::fix_constant(diag, HFSet::numeral(1)).cond, 1},
        {C("odds", "rank=1 period=[{(0)},{(1)},{(2)}]"), 0},
        {C("prelude=01 period=110", "rank=2 period=[{(2,0),(1,1)}]"), 0},
    };
    const long B = 16;
    int n = 0;
    for (const auto& [c, m] : battery) {
        std::string tag = "case " + std::to_string(n++);
        try {
            auto out = fc::decide_membership(c, m, B);
            if (fc::extends(out, c) != fc::Tri::yes) o.fail(tag + ": output does not extend input");
            std::string G = "G" + std::to_string(m);
            for (long k = 0; k <= B; ++k) {
                auto yes = fc::forces_los(out, formula::parse(std::to_string(k) + " in " + G));
                auto no = fc::forces_los(out, formula::parse("!(" + std::to_string(k) + " in " + G + ")"));
                if (yes != fc::Tri::yes && no != fc::Tri::yes) o.fail(tag + ": " + std::to_string(k) + " undecided");
            }
            (void)fc::standard_part_name(out, m, B);
        } catch (const DomainError& e) {
            o.fail(tag + ": " + e.what());
        }
    }
    if (o.pass) o.detail = "10 conditions, B = 16, all extend and decide";
    return o;
}

// ---- 8: thickness ----

th::FinFamily random_family(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth > 0 ? 6 : 3), small(0, 4);
    switch (pick(rng)) {
        case 0: return th::FinFamily::contains(small(rng));
        case 1: return th::FinFamily::at_least(small(rng));
        case 2: return th::FinFamily::at_most(small(rng) + 2);
        case 3: return th::FinFamily::contains(small(rng));
        case 4: return random_family(rng, depth - 1) & random_family(rng, depth - 1);
        case 5: return random_family(rng, depth - 1) | random_family(rng, depth - 1);
        default: return !random_family(rng, depth - 1);
    }
}

Outcome thickness() {
    Outcome o;
    for (long x : {0L, 3L, 5L, 11L})
        for (const auto& r : th::thickness_nu(th::FinFamily::contains(x), 8))
            if (!r.nu || *r.nu != r.m + 1) o.fail("nu of contains(" + std::to_string(x) + ")");
    for (long m = 0; m <= 4; ++m)
        if (brute_nu(th::FinFamily::contains(5), m) != m + 1) o.fail("brute oracle disagrees");

    // Dichotomy: if both parts had thin witnesses of size <= 6, their union
    // (size <= 12) would witness thinness of p. So require p thick up to 12.
    std::mt19937 rng(64);
    int pairs = 0, tries = 0;
    while (pairs < 50 && tries < 5000) {
        ++tries;
        auto p = random_family(rng, 2);
        if (!th::thick_up_to(p, 12)) continue;
        auto S = random_family(rng, 2);
        bool in = th::thick_up_to(p & S, 6), out = th::thick_up_to(p & !S, 6);
        if (!in && !out) o.fail("both parts thin: p = " + p.to_string() + ", S = " + S.to_string());
        ++pairs;
    }
    if (pairs < 50) o.fail("generated only " + std::to_string(pairs) + " thick families");

    std::vector<th::FinFamily> chain;
    auto acc = th::FinFamily::contains(0);
    for (long n = 0; n < 4; ++n) {
        if (n > 0) acc = acc & th::FinFamily::contains(n);
        chain.push_back(acc);
    }
    auto rep = th::diagonal_thick(chain, 5);
    if (!rep.thick) o.fail("diagonal union thin below 6");
    std::ostringstream d;
    for (const auto& b : rep.bounds) {
        if (b.observed > b.k) o.fail("bound exceeded for n = " + std::to_string(b.n));
        d << " n=" << b.n << ":k=" << b.k;
    }
    if (o.pass) o.detail = "nu(m) = m+1 to m = 8, 50 dichotomy pairs, diagonal bounds" + d.str();
    return o;
}

// ---- 9: Peano ----

Outcome peano() {
    Outcome o;
    Expr f = parse_expr("2*x");
    Rational prev_err = 0;
    for (int k = 2; k <= 8; ++k) {
        Rational h = pow2(-k);
        Rational err = peano_euler(f, h, 1).back().y - 1;
        if (err != -h) o.fail("error at k = " + std::to_string(k) + " is " + to_string(err));
        if (k > 2 && err / prev_err != Rational(1, 2)) o.fail("halving ratio at k = " + std::to_string(k));
        prev_err = err;
    }
    for (const auto& pt : peano_study(f, Rational(1, 4), 1, 5))
        if (std::abs(to_double(pt.extrapolated - pt.x * pt.x)) >= 1e-6) o.fail("extrapolation at x = " + to_string(pt.x));
    if (o.pass) o.detail = "error -h for h = 2^-2..2^-8, extrapolation within 1e-6";
    return o;
}

// ---- 10: homogeneity and pullback ----

HFSet random_small_set(std::mt19937& rng) {
    const auto& u = universe(2);
    return u[std::uniform_int_distribution<std::size_t>(0, u.size() - 1)(rng)];
}

fc::FiberValue random_value(std::mt19937& rng, int rank) {
    std::uniform_int_distribution<int> count(1, 3);
    std::vector<fc::Tuple> ts;
    for (int n = count(rng); n > 0; --n) {
        fc::Tuple t;
        for (int j = 0; j < rank; ++j) t.push_back(random_small_set(rng));
        ts.push_back(t);
    }
    return fc::make_value(ts);
}

fc::Fiber random_fiber(std::mt19937& rng, int rank) {
    std::uniform_int_distribution<int> pre(0, 2), per(1, 3);
    std::vector<fc::FiberValue> a(pre(rng)), b(per(rng));
    for (auto& v : a) v = random_value(rng, rank);
    for (auto& v : b) v = random_value(rng, rank);
    return fc::tabular(rank, a, b);
}

fc::IndexSet random_unbounded(std::mt19937& rng) {
    std::uniform_int_distribution<int> len(0, 3), bit(0, 1);
    for (;;) {
        std::vector<bool> pre(len(rng)), per(1 + len(rng));
        for (auto&& x : pre) x = bit(rng);
        for (auto&& x : per) x = bit(rng);
        fc::IndexSet s(pre, per);
        if (s.unbounded()) return s;
    }
}

// Quantifier-free formula over placeholders #0..#(s-1) and small constants.
std::string random_qf(std::mt19937& rng, int s, int depth) {
    std::uniform_int_distribution<int> kind(0, depth > 0 ? 4 : 1), var(0, s - 1), num(0, 2);
    auto term = [&] {
        return std::uniform_int_distribution<int>(0, 2)(rng) ? "#" + std::to_string(var(rng)) : std::to_string(num(rng));
    };
    switch (kind(rng)) {
        case 0: return term() + " = " + term();
        case 1: return term() + " in " + term();
        case 2: return "!(" + random_qf(rng, s, depth - 1) + ")";
        case 3: return "(" + random_qf(rng, s, depth - 1) + " & " + random_qf(rng, s, depth - 1) + ")";
        default: return "(" + random_qf(rng, s, depth - 1) + " | " + random_qf(rng, s, depth - 1) + ")";
    }
}

std::string instantiate(std::string f, const std::vector<int>& sigma, const std::string& prefix = "G") {
    for (std::size_t j = 0; j < sigma.size(); ++j) {
        std::string from = "#" + std::to_string(j), to = prefix + std::to_string(sigma[j]);
        for (std::size_t at; (at = f.find(from)) != std::string::npos;) f.replace(at, from.size(), to);
    }
    return f;
}

Outcome homogeneity_pullback() {
    Outcome o;
    std::mt19937 rng(55);
    int homo = 0, pull = 0, simple = 0;
    for (int t = 0; t < 100; ++t) {
        // Homogeneity: q2 is the s-projection of q1 with constant columns added and
        // coordinates shuffled, so the projections agree everywhere.
        int k = 2 + t % 2, s = 1 + t % 2;
        auto q1 = random_fiber(rng, k);
        std::vector<int> sigma1(k);
        for (int j = 0; j < k; ++j) sigma1[j] = j;
        std::shuffle(sigma1.begin(), sigma1.end(), rng);
        sigma1.resize(s);
        fc::Fiber base = fc::project(q1, sigma1);
        int extra = 1 + t % 2;
        for (int e = 0; e < extra; ++e) base = fc::append_column(base, fc::hconst(random_small_set(rng)));
        std::vector<int> perm(s + extra);
        for (int j = 0; j < s + extra; ++j) perm[j] = j;
        std::shuffle(perm.begin(), perm.end(), rng);
        auto q2 = fc::project(base, perm);
        std::vector<int> sigma2(s);
        for (int j = 0; j < s; ++j) sigma2[j] = static_cast<int>(std::find(perm.begin(), perm.end(), j) - perm.begin());

        auto p = random_unbounded(rng);
        for (long i = 0; i < 40; ++i)
            if (fc::project(q1, sigma1).at(i) != fc::project(q2, sigma2).at(i)) o.fail("projection premise fails");
        std::string phi = random_qf(rng, s, 2);
        auto v1 = fc::forces_los(fc::Condition(p, q1), formula::parse(instantiate(phi, sigma1)));
        auto v2 = fc::forces_los(fc::Condition(p, q2), formula::parse(instantiate(phi, sigma2)));
        if (v1 != v2) o.fail("homogeneity: " + phi);
        ++homo;

        // Pullback: pull a condition back along an increasing gamma: p' -> p.
        auto pp = random_unbounded(rng);
        fc::Reindexing gamma{pp, p};
        auto q = random_fiber(rng, k);
        std::vector<int> all(k);
        for (int j = 0; j < k; ++j) all[j] = j;
        std::string psi = instantiate(random_qf(rng, k, 2), all);
        auto a = fc::forces_los(fc::Condition(p, q), formula::parse(psi));
        auto b = fc::forces_los(fc::Condition(pp, fc::reindex(q, gamma)), formula::parse(psi));
        if (a != b) o.fail("pullback: " + psi);
        ++pull;

        // Simplified forcing is invariant under the induced isomorphism.
        std::map<std::string, fc::SimpleName> names, pulled;
        std::vector<int> idx{0, 1};
        for (int j : idx) {
            fc::SimpleName f;
            for (int n = std::uniform_int_distribution<int>(0, 2)(rng); n > 0; --n) f.prelude.push_back(random_small_set(rng));
            for (int n = std::uniform_int_distribution<int>(1, 3)(rng); n > 0; --n) f.period.push_back(random_small_set(rng));
            names["f" + std::to_string(j)] = f;
            pulled["f" + std::to_string(j)] = fc::compose(f, gamma);
        }
        std::string atom = random_qf(rng, 2, 0);
        if (std::uniform_int_distribution<int>(0, 3)(rng) == 0) atom = "st(#" + std::to_string(t % 2) + ")";
        auto inst = formula::parse(instantiate(atom, idx, "f"));
        if (fc::simplified_forces(p, inst, names) != fc::simplified_forces(pp, inst, pulled))
            o.fail("simplified pullback: " + formula::print(inst));
        ++simple;
    }
    if (o.pass)
        o.detail = std::to_string(homo) + " homogeneity, " + std::to_string(pull) + " pullback, " + std::to_string(simple) +
                   " simplified samples, 0 violations";
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        Outcome (*run)();
    };
    const Criterion all[] = {
        {1, "derivative oracle equivalence", derivatives},
        {2, "hyperfinite integral", integrals},
        {3, "measure", measures},
        {4, "rewriter golden tests", rewriter_golden},
        {5, "rewriter refutation suite", rewriter_refutation},
        {6, "forcing equivalence", forcing_equivalence},
        {7, "diagonalization", diagonalization},
        {8, "thickness", thickness},
        {9, "Peano", peano},
        {10, "homogeneity and pullback", homogeneity_pullback},
    };
    int failed = 0;
    for (const auto& c : all) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << " " << c.id << " " << c.name << ": " << o.detail << std::endl;
        failed += !o.pass;
    }
    return failed ? 1 : 0;
}
