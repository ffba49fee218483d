#include "hyperlab/error.hpp"
#include "hyperlab/forcing.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace hyperlab::forcing {

Named fix_constant(const Condition& c, HFSet z) {
    return {Condition(c.p, append_column(c.q, hconst(z))), c.q.rank()};
}

Named diag_name(const Condition& c) { return {Condition(c.p, append_column(c.q, hvn(0))), c.q.rank()}; }

Condition decide_membership(const Condition& c, int m, long B) {
    int k = c.q.rank();
    if (m < 0 || m >= k) throw DomainError("rank-violation", "name index " + std::to_string(m) + " needs rank > m");
    if (B < 0) throw DomainError("bad-bound", "B must be nonnegative");

    std::vector<IndexSet> ps = {c.p};
    std::vector<Fiber> qs = {c.q};
    for (long n = 0; n <= B; ++n) {
        const IndexSet& pn = ps.back();
        const Fiber& qn = qs.back();
        HFSet x = HFSet::numeral(n);
        auto all_contain = [&](long i) {
            if (!pn.contains(i)) return false;
            for (const auto& t : qn.at(i))
                if (!t[m].contains(x)) return false;
            return true;
        };
        Condition cur(pn, qn);
        Window w = window(cur, std::max<int>(kUniverseRank, x.rank()));
        if (qn.generative()) {
            long shift = w.period * (1 + 16 / w.period);
            for (long i = w.start; i < w.start + w.period; ++i)
                if (all_contain(i) != all_contain(i + shift))
                    throw DomainError("undecidable-branch",
                                      "membership of " + std::to_string(n) + " does not settle by the horizon");
        }
        IndexSet branch = IndexSet::tabulate(all_contain, w.start, w.period);
        IndexSet next_p = branch;
        Fiber next_q = qn;
        if (!branch.unbounded()) {
            next_p = difference(pn, branch);
            next_q = filter(qn, next_p, [m, x](const Tuple& t) { return !t[m].contains(x); }, x.rank(),
                            std::to_string(n) + " not in G" + std::to_string(m));
        }
        ps.push_back(next_p.without(next_p.least()));
        qs.push_back(next_q);
    }

    std::vector<long> bounds;
    for (const auto& p : ps) bounds.push_back(p.least());
    const IndexSet& tail = ps.back();
    auto member = [&](long i) {
        if (i < bounds[0]) return false;
        auto it = std::upper_bound(bounds.begin(), bounds.end(), i);
        return ps[static_cast<std::size_t>(it - bounds.begin()) - 1].contains(i);
    };
    IndexSet p_out = IndexSet::tabulate(member, std::max(bounds.back(), tail.start()), tail.period());
    Fiber stairs = staircase(bounds, qs);
    Fiber q_out = filter(stairs, p_out, [](const Tuple&) { return true; }, 0, "staircase domain");
    return Condition(p_out, q_out);
}

std::vector<int> standard_part_name(const Condition& c, int m, long B) {
    std::vector<int> bits;
    for (long n = 0; n <= B; ++n) {
        auto atom = formula::parse(std::to_string(n) + " in G" + std::to_string(m));
        if (forces_los(c, atom) == Tri::yes) bits.push_back(1);
        else if (forces_los(c, formula::make_not(atom)) == Tri::yes) bits.push_back(0);
        else throw DomainError("undecided", std::to_string(n) + " in G" + std::to_string(m) + " is not decided");
    }
    return bits;
}

std::vector<Condition> pseudo_generic(const Condition& start, const std::vector<DenseRule>& rules) {
    std::vector<Condition> chain = {start};
    for (const auto& r : rules) {
        Condition next = r.finder(chain.back());
        if (extends(next, chain.back()) != Tri::yes)
            throw DomainError("contract-violation", "rule '" + r.description + "' returned a non-extension");
        chain.push_back(next);
    }
    return chain;
}

// ---- simplified forcing ----

HFSet SimpleName::at(long i) const {
    if (period.empty()) throw DomainError("empty-period", "simple name needs a period");
    long P = static_cast<long>(prelude.size());
    if (i < P) return prelude[i];
    return period[(i - P) % static_cast<long>(period.size())];
}

namespace {

std::vector<HFSet> parse_list(std::string_view s) {
    auto trim = [](std::string_view v) {
        while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front()))) v.remove_prefix(1);
        while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back()))) v.remove_suffix(1);
        return v;
    };
    s = trim(s);
    if (s.size() < 2 || s.front() != '[' || s.back() != ']') throw SyntaxError("expected [...]", 0);
    s = trim(s.substr(1, s.size() - 2));
    std::vector<HFSet> out;
    if (s.empty()) return out;
    int depth = 0;
    std::size_t from = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || (s[i] == ',' && depth == 0)) {
            out.push_back(parse_hfset(trim(s.substr(from, i - from))));
            from = i + 1;
        } else if (s[i] == '{') ++depth;
        else if (s[i] == '}') --depth;
    }
    return out;
}

std::string list_string(const std::vector<HFSet>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + to_string(v[i]);
    return s + "]";
}

}  // namespace

SimpleName parse_simple_name(std::string_view text) {
    auto pre = text.find("prelude=");
    auto per = text.find("period=");
    if (per == std::string_view::npos) throw SyntaxError("simple name needs period=[...]", 0);
    SimpleName f;
    if (pre != std::string_view::npos) {
        std::size_t end = pre < per ? per : text.size();
        f.prelude = parse_list(text.substr(pre + 8, end - pre - 8));
    }
    std::size_t end = pre != std::string_view::npos && pre > per ? pre : text.size();
    f.period = parse_list(text.substr(per + 7, end - per - 7));
    if (f.period.empty()) throw SyntaxError("empty period", per);
    return f;
}

std::string to_string(const SimpleName& f) {
    return "prelude=" + list_string(f.prelude) + " period=" + list_string(f.period);
}

SimpleName compose(const SimpleName& f, const Reindexing& g) {
    if (!g.dom.unbounded() || !g.target.unbounded())
        throw DomainError("bounded-index-set", "reindexing needs unbounded domain and target");
    long P = static_cast<long>(f.prelude.size()), L = static_cast<long>(f.period.size());
    long x = std::max(P, g.target.start());
    long start = std::max(g.dom.start(), g.dom.nth(g.target.count_below(x)));
    long t = std::count(g.target.period_bits().begin(), g.target.period_bits().end(), true);
    long len = g.dom.period() * t * L;
    SimpleName out;
    for (long i = 0; i < start; ++i) out.prelude.push_back(f.at(g(i)));
    for (long i = start; i < start + len; ++i) out.period.push_back(f.at(g(i)));
    return out;
}

bool simplified_forces(const IndexSet& p, const formula::Formula& atom, const std::map<std::string, SimpleName>& names) {
    using formula::Node;
    using formula::TermNode;
    if (!p.unbounded()) throw DomainError("bounded-index-set", "p must be unbounded");

    std::function<SimpleName(const formula::Term&)> name_of = [&](const formula::Term& t) -> SimpleName {
        if (t->kind == TermNode::Kind::var) {
            auto it = names.find(t->name);
            if (it == names.end()) throw DomainError("unknown-name", t->name);
            return it->second;
        }
        if (t->kind == TermNode::Kind::num) {
            if (!is_integer(t->value) || t->value < 0 || t->value > 64) throw DomainError("bad-constant", formula::print(t));
            return SimpleName::constant(HFSet::numeral(static_cast<long>(floor(t->value))));
        }
        if (t->kind == TermNode::Kind::set) {
            std::vector<SimpleName> parts;
            for (const auto& a : t->args) {
                parts.push_back(name_of(a));
                if (!parts.back().prelude.empty() || parts.back().period.size() != 1)
                    throw DomainError("unsupported-atom", "set literals take constants only");
            }
            std::vector<HFSet> elems;
            for (const auto& s : parts) elems.push_back(s.period[0]);
            return SimpleName::constant(HFSet::make(std::move(elems)));
        }
        throw DomainError("unsupported-atom", formula::print(t));
    };

    bool negated = false;
    formula::Formula f = atom;
    if (f->kind == Node::Kind::not_) negated = true, f = f->kids[0];
    if (f->kind == Node::Kind::neq) negated = !negated;

    std::vector<SimpleName> args;
    for (const auto& t : f->terms) args.push_back(name_of(t));
    long start = p.start(), L = p.period();
    for (const auto& a : args) {
        start = std::max(start, static_cast<long>(a.prelude.size()));
        L = std::lcm(L, static_cast<long>(a.period.size()));
    }

    switch (f->kind) {
        case Node::Kind::st: {
            // Some value recurs unboundedly on p, so a negated st is never forced.
            if (negated) return false;
            std::set<HFSet> seen;
            for (long i = start; i < start + L; ++i)
                if (p.contains(i)) seen.insert(args[0].at(i));
            return seen.size() == 1;
        }
        case Node::Kind::eq:
        case Node::Kind::neq:
        case Node::Kind::in: {
            bool is_in = f->kind == Node::Kind::in;
            for (long i = start; i < start + L; ++i) {
                if (!p.contains(i)) continue;
                bool v = is_in ? args[1].at(i).contains(args[0].at(i)) : args[0].at(i) == args[1].at(i);
                if (v == negated) return false;
            }
            return true;
        }
        default: throw DomainError("unsupported-atom", formula::print(atom));
    }
}

// ---- fiber splitting ----

SplitResult split_fibers(const Fiber& r, const IndexSet& p, int stages) {
    if (r.rank() != 1) throw DomainError("rank-mismatch", "splitting needs a rank-1 fiber");
    if (!p.unbounded()) throw DomainError("bounded-index-set", "p must be unbounded");
    if (stages < 6) throw DomainError("bad-bound", "at least 6 stages are needed to see a pattern");

    // Work in positions j of p, i.e. with the index p.nth(j).
    auto values = [&](long j) {
        std::vector<HFSet> out;
        for (const auto& t : r.at(p.nth(j))) out.push_back(t[0]);
        return out;
    };
    std::map<HFSet, long> last;
    auto i_x = [&](HFSet x) {
        if (auto it = last.find(x); it != last.end()) return it->second;
        auto b = r.occurrence_bound(x);
        if (!b) throw DomainError("unbounded-occurrence", to_string(x) + " may occur unboundedly often");
        long best = -1;
        for (long j = 0; p.nth(j) <= *b; ++j) {
            auto v = values(j);
            if (std::find(v.begin(), v.end(), x) != v.end()) best = j;
        }
        return last[x] = best;
    };

    SplitResult out{IndexSet::all(), IndexSet::all(), {}, {}, {}, false};
    long n = 0;
    std::vector<std::vector<HFSet>> chosen;
    for (int l = 0; l < stages; ++l) {
        auto v = values(n);
        long alpha = -1;
        for (const auto& x : v) alpha = alpha < 0 ? i_x(x) : std::min(alpha, i_x(x));
        std::vector<HFSet> s;
        for (const auto& x : v)
            if (i_x(x) == alpha) s.push_back(x);
        out.n.push_back(n);
        out.alpha.push_back(alpha);
        out.s.emplace_back(p.nth(n), s);
        chosen.push_back(s);
        n = alpha + 1;
    }

    std::set<HFSet> seen, even, odd;
    bool disjoint = true;
    for (std::size_t l = 0; l < chosen.size(); ++l)
        for (const auto& x : chosen[l]) {
            disjoint = disjoint && seen.insert(x).second;
            (l % 2 ? odd : even).insert(x);
        }
    for (const auto& x : even) disjoint = disjoint && !odd.count(x);
    out.disjoint = disjoint;

    // A constant gap d from some stage on makes both halves periodic with period 2d.
    const auto& ns = out.n;
    long d = ns.back() - ns[ns.size() - 2];
    std::size_t l0 = ns.size() - 1;
    while (l0 > 0 && ns[l0] - ns[l0 - 1] == d) --l0;
    if (d <= 0 || ns.size() - l0 < 5) throw DomainError("no-periodic-pattern", "stage gaps do not settle");
    if (l0 % 2) ++l0;
    long base = ns[l0];
    auto positions = [&](std::size_t parity) {
        std::vector<bool> pre(base, false), per(2 * d, false);
        for (std::size_t l = parity; l < l0; l += 2) pre[ns[l]] = true;
        per[parity * d] = true;
        return IndexSet(pre, per);
    };
    out.p1 = image(p, positions(0));
    out.p2 = image(p, positions(1));
    return out;
}

}  // namespace hyperlab::forcing
