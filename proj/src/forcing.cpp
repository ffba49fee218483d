#include "hyperlab/error.hpp"
#include "hyperlab/forcing.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <numeric>
#include <set>

namespace hyperlab::forcing {

using formula::Formula;
using formula::Node;
using formula::QKind;
using formula::Term;
using formula::TermNode;

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::forced: return "forced";
        case Verdict::refuted: return "refuted";
        case Verdict::unknown: return "unknown";
    }
    return "?";
}

namespace {

// Index of a name G<n>, or -1 for any other identifier.
int name_index(const std::string& s) {
    if (s.size() < 2 || s[0] != 'G') return -1;
    int n = 0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return -1;
        n = n * 10 + (s[i] - '0');
    }
    return n;
}

void names_in(const Term& t, const std::set<std::string>& bound, int& best) {
    if (t->kind == TermNode::Kind::var && !bound.count(t->name)) best = std::max(best, name_index(t->name));
    for (const auto& a : t->args) names_in(a, bound, best);
}

void names_in(const Formula& f, std::set<std::string> bound, int& best) {
    for (const auto& t : f->terms) names_in(t, bound, best);
    if (f->kind == Node::Kind::quant) bound.insert(f->var);
    for (const auto& k : f->kids) names_in(k, bound, best);
}

[[noreturn]] void not_in_formula(const std::string& what) {
    throw DomainError("not-in-formula", what + " has no meaning in the set-theoretic forcing language");
}

HFSet constant_value(const Term& t) {
    switch (t->kind) {
        case TermNode::Kind::num: {
            if (!is_integer(t->value) || t->value < 0 || t->value > 64)
                throw DomainError("bad-constant", "numerals denote von Neumann naturals 0..64");
            return HFSet::numeral(static_cast<long>(floor(t->value)));
        }
        case TermNode::Kind::set: {
            std::vector<HFSet> elems;
            for (const auto& a : t->args) elems.push_back(constant_value(a));
            return HFSet::make(std::move(elems));
        }
        default: throw DomainError("not-a-constant", formula::print(t));
    }
}

int constant_rank(const Formula& f) {
    int r = 0;
    std::function<void(const Term&)> term = [&](const Term& t) {
        if (t->kind == TermNode::Kind::num || (t->kind == TermNode::Kind::set && t->args.empty())) {
            r = std::max(r, constant_value(t).rank());
            return;
        }
        for (const auto& a : t->args) term(a);
        if (t->kind == TermNode::Kind::set) {
            try {
                r = std::max(r, constant_value(t).rank());
            } catch (const DomainError&) {
            }
        }
    };
    std::function<void(const Formula&)> walk = [&](const Formula& g) {
        for (const auto& t : g->terms) term(t);
        for (const auto& k : g->kids) walk(k);
    };
    walk(f);
    return r;
}

// Evaluates an in-formula at one tuple, plain quantifiers over a finite universe.
class TupleEval {
public:
    TupleEval(const std::vector<HFSet>& universe) : universe_(universe) {}

    bool holds(const Formula& f, const Tuple& t) {
        tuple_ = &t;
        env_.clear();
        return eval(f);
    }

private:
    const std::vector<HFSet>& universe_;
    const Tuple* tuple_ = nullptr;
    std::vector<std::pair<std::string, HFSet>> env_;

    HFSet value(const Term& t) {
        switch (t->kind) {
            case TermNode::Kind::var: {
                for (auto it = env_.rbegin(); it != env_.rend(); ++it)
                    if (it->first == t->name) return it->second;
                int n = name_index(t->name);
                if (n < 0) throw DomainError("free-variable", t->name);
                return (*tuple_)[n];
            }
            case TermNode::Kind::num: return constant_value(t);
            case TermNode::Kind::set: {
                std::vector<HFSet> elems;
                for (const auto& a : t->args) elems.push_back(value(a));
                return HFSet::make(std::move(elems));
            }
            default: not_in_formula("term '" + formula::print(t) + "'");
        }
    }

    bool eval(const Formula& f) {
        switch (f->kind) {
            case Node::Kind::eq: return value(f->terms[0]) == value(f->terms[1]);
            case Node::Kind::neq: return !(value(f->terms[0]) == value(f->terms[1]));
            case Node::Kind::in: return value(f->terms[1]).contains(value(f->terms[0]));
            case Node::Kind::not_: return !eval(f->kids[0]);
            case Node::Kind::and_: return eval(f->kids[0]) && eval(f->kids[1]);
            case Node::Kind::or_: return eval(f->kids[0]) || eval(f->kids[1]);
            case Node::Kind::implies: return !eval(f->kids[0]) || eval(f->kids[1]);
            case Node::Kind::quant: {
                if (f->q != QKind::all && f->q != QKind::ex) not_in_formula(std::string("quantifier ") + keyword(f->q));
                if (f->bound) not_in_formula("bounded quantifier");
                bool want = f->q == QKind::ex;
                for (const auto& x : universe_) {
                    env_.emplace_back(f->var, x);
                    bool b = eval(f->kids[0]);
                    env_.pop_back();
                    if (b == want) return want;
                }
                return !want;
            }
            case Node::Kind::st: not_in_formula("st");
            case Node::Kind::mag: not_in_formula("mag");
            default: not_in_formula("atom '" + formula::print(f) + "'");
        }
    }
};

void check_rank(const Condition& c, const Formula& phi) {
    int n = max_name_index(phi);
    if (n >= c.q.rank())
        throw DomainError("rank-violation",
                          "G" + std::to_string(n) + " needs rank > " + std::to_string(n) + ", condition has rank " +
                              std::to_string(c.q.rank()));
}

// Per-position truth of "all tuples satisfy" over one window.
std::vector<bool> scan(const Condition& c, const std::function<bool(const FiberValue&)>& ok, long start, long L) {
    std::vector<bool> out;
    for (long i = start; i < start + L; ++i) out.push_back(!c.p.contains(i) || ok(c.q.at(i)));
    return out;
}

long second_window_shift(long L) { return L * (1 + 16 / L); }

Tri almost_all(const Condition& c, int R, const std::function<bool(const FiberValue&)>& ok) {
    Window w = window(c, R);
    auto first = scan(c, ok, w.start, w.period);
    bool all = std::all_of(first.begin(), first.end(), [](bool b) { return b; });
    if (!c.q.generative()) return all ? Tri::yes : Tri::no;
    auto second = scan(c, ok, w.start + second_window_shift(w.period), w.period);
    if (first != second) return Tri::unknown;
    return all ? Tri::yes : Tri::no;
}

// st(Gn): one value of coordinate n across p, past the prelude.
Tri eventually_constant(const Condition& c, int n) {
    Window w = window(c, kUniverseRank);
    auto values = [&](long start) {
        std::set<HFSet> seen;
        for (long i = start; i < start + w.period; ++i)
            if (c.p.contains(i))
                for (const auto& t : c.q.at(i)) seen.insert(t[n]);
        return seen;
    };
    auto first = values(w.start);
    if (!c.q.generative()) return first.size() == 1 ? Tri::yes : Tri::no;
    auto second = values(w.start + second_window_shift(w.period));
    if (first.size() == 1 && first == second) return Tri::yes;
    if (first != second) return Tri::no;  // growth: some coordinate keeps changing
    return Tri::unknown;
}

Term subst_term(const Term& t, const std::string& var, const std::string& name) {
    if (t->kind == TermNode::Kind::var) return t->name == var ? formula::make_var(name) : t;
    if (t->args.empty()) return t;
    auto n = std::make_shared<TermNode>(*t);
    for (auto& a : n->args) a = subst_term(a, var, name);
    return n;
}

Formula subst(const Formula& f, const std::string& var, const std::string& name) {
    if (f->kind == Node::Kind::quant && f->var == var) return f;
    auto n = std::make_shared<Node>(*f);
    for (auto& t : n->terms) t = subst_term(t, var, name);
    for (auto& k : n->kids) k = subst(k, var, name);
    return n;
}

Formula make_atom(Node::Kind kind, std::vector<Term> terms) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->terms = std::move(terms);
    return n;
}

// The primitives are negation, conjunction and the existential quantifier.
Formula primitive(const Formula& f) {
    using formula::make_and;
    using formula::make_not;
    switch (f->kind) {
        case Node::Kind::neq: return make_not(make_atom(Node::Kind::eq, f->terms));
        case Node::Kind::or_: return make_not(make_and(make_not(f->kids[0]), make_not(f->kids[1])));
        case Node::Kind::implies: return make_not(make_and(f->kids[0], make_not(f->kids[1])));
        case Node::Kind::quant: {
            if (f->bound) not_in_formula("bounded quantifier");
            if (formula::is_in(f->q)) not_in_formula(std::string("quantifier ") + keyword(f->q));
            auto st = make_atom(Node::Kind::st, {formula::make_var(f->var)});
            switch (f->q) {
                case QKind::all: return make_not(formula::make_quant(QKind::ex, f->var, f->sort, make_not(f->kids[0])));
                case QKind::all_st:
                    return make_not(formula::make_quant(QKind::ex, f->var, f->sort, make_and(st, make_not(f->kids[0]))));
                case QKind::ex_st: return formula::make_quant(QKind::ex, f->var, f->sort, make_and(st, f->kids[0]));
                default: return f;
            }
        }
        default: return f;
    }
}

bool is_atomic_in(const Formula& f) {
    return f->kind == Node::Kind::eq || f->kind == Node::Kind::in;
}

}  // namespace

int max_name_index(const Formula& f) {
    int best = -1;
    names_in(f, {}, best);
    return best;
}

Tri forces_los(const Condition& c, const Formula& phi, int universe_rank) {
    check_rank(c, phi);
    int R = std::max(universe_rank, constant_rank(phi));
    TupleEval ev(universe(universe_rank));
    return almost_all(c, R, [&](const FiberValue& v) {
        for (const auto& t : v)
            if (!ev.holds(phi, t)) return false;
        return true;
    });
}

// ---- the enumerated space ----

Space::Space(std::vector<Condition> conds, int universe_rank) : conds_(std::move(conds)), universe_rank_(universe_rank) {
    for (const auto& c : conds_) {
        if (c.q.generative()) throw DomainError("space-not-tabular", "space members need tabular fibers");
        start_ = std::max({start_, c.p.start(), c.q.horizon(universe_rank_)});
        period_ = std::lcm(period_, std::lcm(c.p.period(), c.q.period()));
    }
    long W = start_ + period_;
    if (W > 64) throw DomainError("space-too-wide", "prelude plus period must fit 64 positions");

    std::map<FiberValue, std::uint16_t> vid;
    for (const auto& c : conds_) {
        Compiled k{0, c.q.rank(), {}};
        for (long i = 0; i < W; ++i) {
            if (c.p.contains(i)) k.pmask |= std::uint64_t{1} << i;
            auto v = c.q.at(i);
            auto [it, fresh] = vid.emplace(v, static_cast<std::uint16_t>(values_.size()));
            if (fresh) values_.push_back(v);
            k.vids.push_back(it->second);
        }
        compiled_.push_back(std::move(k));
    }

    std::size_t V = values_.size();
    contain_.assign(V, std::vector<std::int8_t>(V, 0));
    for (std::size_t b = 0; b < V; ++b)
        for (std::size_t a = 0; a < V; ++a) {
            std::size_t ka = values_[a][0].size();
            if (values_[b][0].size() < ka) continue;
            bool ok = true;
            for (const auto& t : values_[b]) {
                Tuple pre(t.begin(), t.begin() + ka);
                ok = ok && std::binary_search(values_[a].begin(), values_[a].end(), pre);
            }
            contain_[b][a] = ok;
        }

    for (std::size_t i = 0; i < conds_.size(); ++i) index_.emplace(key(compiled_[i]), i);

    // Signatures drop the prelude values, which extension never inspects.
    std::map<std::vector<long>, std::size_t> sig;
    for (const auto& c : compiled_) {
        std::vector<long> s = {static_cast<long>(c.pmask), c.rank};
        for (long i = start_; i < W; ++i) s.push_back(c.vids[i]);
        auto [it, fresh] = sig.emplace(s, sig_rep_.size());
        if (fresh) sig_rep_.push_back(static_cast<std::size_t>(&c - compiled_.data()));
        sig_of_.push_back(it->second);
    }
    std::size_t S = sig_rep_.size(), words = (conds_.size() + 63) / 64;
    std::vector<Bits> members(S, Bits(words, 0));
    for (std::size_t i = 0; i < conds_.size(); ++i) members[sig_of_[i]][i / 64] |= std::uint64_t{1} << (i % 64);
    sig_ext_.assign(S, Bits(words, 0));
    for (std::size_t a = 0; a < S; ++a)
        for (std::size_t b = 0; b < S; ++b)
            if (fast_extends(compiled_[sig_rep_[b]], compiled_[sig_rep_[a]]))
                for (std::size_t w = 0; w < words; ++w) sig_ext_[a][w] |= members[b][w];
}

std::string Space::key(const Compiled& c) const {
    std::string k = std::to_string(c.pmask) + "/" + std::to_string(c.rank);
    for (auto v : c.vids) k += "/" + std::to_string(v);
    return k;
}

bool Space::fast_extends(const Compiled& b, const Compiled& a) const {
    if (b.pmask & ~a.pmask) return false;
    if (b.rank < a.rank) return false;
    for (long i = start_; i < start_ + period_; ++i)
        if ((b.pmask >> i & 1) && !contain_[b.vids[i]][a.vids[i]]) return false;
    return true;
}

bool Space::extends(std::size_t b, std::size_t a) const {
    return sig_ext_[sig_of_[a]][b / 64] >> (b % 64) & 1;
}

std::vector<std::size_t> Space::extensions(std::size_t a) const {
    std::vector<std::size_t> out;
    const Bits& e = sig_ext_[sig_of_[a]];
    for (std::size_t w = 0; w < e.size(); ++w)
        for (std::uint64_t x = e[w]; x; x &= x - 1) out.push_back(w * 64 + std::countr_zero(x));
    return out;
}

std::optional<std::size_t> Space::find(const Condition& c) const {
    if (c.q.generative()) return std::nullopt;
    if (c.p.start() > start_ || period_ % c.p.period() || c.q.horizon(universe_rank_) > start_ || period_ % c.q.period())
        return std::nullopt;
    Compiled k{0, c.q.rank(), {}};
    for (long i = 0; i < start_ + period_; ++i) {
        if (c.p.contains(i)) k.pmask |= std::uint64_t{1} << i;
        auto it = std::find(values_.begin(), values_.end(), c.q.at(i));
        if (it == values_.end()) return std::nullopt;
        k.vids.push_back(static_cast<std::uint16_t>(it - values_.begin()));
    }
    auto it = index_.find(key(k));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

const Space::Bits& Space::forced_set(const Formula& phi) {
    std::string k = formula::print(phi);
    if (auto it = memo_.find(k); it != memo_.end()) return it->second;
    Bits b = compute_forced(phi);
    return memo_.emplace(std::move(k), std::move(b)).first->second;
}

Space::Bits Space::compute_forced(const Formula& phi) {
    std::size_t N = conds_.size(), words = (N + 63) / 64;
    Bits out(words, 0);
    auto set = [&](std::size_t i) { out[i / 64] |= std::uint64_t{1} << (i % 64); };
    int names = max_name_index(phi);

    Formula f = primitive(phi);
    if (f != phi) {
        out = forced_set(f);
        return out;
    }

    if (is_atomic_in(f)) {
        for (std::size_t i = 0; i < N; ++i)
            if (compiled_[i].rank > names && forces_los(conds_[i], f, universe_rank_) == Tri::yes) set(i);
        return out;
    }
    switch (f->kind) {
        case Node::Kind::st: {
            const Term& t = f->terms[0];
            int n = t->kind == TermNode::Kind::var ? name_index(t->name) : -1;
            if (t->kind == TermNode::Kind::var && n < 0) throw DomainError("free-variable", t->name);
            for (std::size_t i = 0; i < N; ++i) {
                if (n < 0) {
                    constant_value(t);
                    set(i);
                    continue;
                }
                if (compiled_[i].rank <= n) continue;
                std::set<HFSet> seen;
                for (long j = start_; j < start_ + period_; ++j)
                    if (compiled_[i].pmask >> j & 1)
                        for (const auto& tup : values_[compiled_[i].vids[j]]) seen.insert(tup[n]);
                if (seen.size() == 1) set(i);
            }
            return out;
        }
        case Node::Kind::and_: {
            const Bits& a = forced_set(f->kids[0]);
            Bits b = a;
            const Bits& c = forced_set(f->kids[1]);
            for (std::size_t w = 0; w < words; ++w) out[w] = b[w] & c[w];
            return out;
        }
        case Node::Kind::not_: {
            const Bits& inner = forced_set(f->kids[0]);
            std::vector<char> sig_ok(sig_ext_.size());
            for (std::size_t s = 0; s < sig_ext_.size(); ++s) {
                bool hit = false;
                for (std::size_t w = 0; w < words && !hit; ++w) hit = sig_ext_[s][w] & inner[w];
                sig_ok[s] = !hit;
            }
            for (std::size_t i = 0; i < N; ++i)
                if (compiled_[i].rank > names && sig_ok[sig_of_[i]]) set(i);
            return out;
        }
        case Node::Kind::quant: {
            // Witnesses are names G0..G{r-1} below the largest rank in the space.
            int max_rank = 0;
            for (const auto& c : compiled_) max_rank = std::max(max_rank, c.rank);
            Bits u(words, 0);
            for (int m = 0; m < max_rank; ++m) {
                const Bits& fm = forced_set(subst(f->kids[0], f->var, "G" + std::to_string(m)));
                for (std::size_t w = 0; w < words; ++w) u[w] |= fm[w];
            }
            Bits dense(words, 0);  // conditions with some extension in u
            for (std::size_t i = 0; i < N; ++i) {
                const Bits& e = sig_ext_[sig_of_[i]];
                bool hit = false;
                for (std::size_t w = 0; w < words && !hit; ++w) hit = e[w] & u[w];
                if (hit) dense[i / 64] |= std::uint64_t{1} << (i % 64);
            }
            std::vector<char> sig_ok(sig_ext_.size());
            for (std::size_t s = 0; s < sig_ext_.size(); ++s) {
                bool all = true;
                for (std::size_t w = 0; w < words && all; ++w) all = (sig_ext_[s][w] & ~dense[w]) == 0;
                sig_ok[s] = all;
            }
            for (std::size_t i = 0; i < N; ++i)
                if (compiled_[i].rank > names && sig_ok[sig_of_[i]]) set(i);
            return out;
        }
        case Node::Kind::mag: not_in_formula("mag");
        default: not_in_formula("atom '" + formula::print(f) + "'");
    }
}

bool Space::forces(std::size_t c, const Formula& phi) {
    const Bits& b = forced_set(phi);
    return b[c / 64] >> (c % 64) & 1;
}

Verdict Space::decide(std::size_t c, const Formula& phi) {
    if (forces(c, phi)) return Verdict::forced;
    if (forces(c, formula::make_not(phi))) return Verdict::refuted;
    return Verdict::unknown;
}

namespace {

struct Outside {
    const Condition& c;
    Space& space;
    std::vector<std::size_t> yes, maybe;  // space members extending c, surely or possibly
};

bool any_in(const std::vector<std::size_t>& ids, const std::function<bool(std::size_t)>& pred) {
    return std::any_of(ids.begin(), ids.end(), pred);
}

}  // namespace

// Clause evaluation for a condition that need not lie in the space.
static Tri forced_outside(Outside& o, const Formula& phi, const std::function<bool(std::size_t, const Formula&)>& in_space) {
    int names = max_name_index(phi);
    Formula f = primitive(phi);
    if (f != phi) return forced_outside(o, f, in_space);
    if (names >= o.c.q.rank()) return Tri::no;
    if (is_atomic_in(f)) return forces_los(o.c, f, o.space.universe_rank());
    switch (f->kind) {
        case Node::Kind::st: {
            const Term& t = f->terms[0];
            if (t->kind != TermNode::Kind::var) return (constant_value(t), Tri::yes);
            int n = name_index(t->name);
            if (n < 0) throw DomainError("free-variable", t->name);
            return eventually_constant(o.c, n);
        }
        case Node::Kind::and_: {
            Tri a = forced_outside(o, f->kids[0], in_space), b = forced_outside(o, f->kids[1], in_space);
            if (a == Tri::no || b == Tri::no) return Tri::no;
            return a == Tri::yes && b == Tri::yes ? Tri::yes : Tri::unknown;
        }
        case Node::Kind::not_: {
            auto forces_inner = [&](std::size_t b) { return in_space(b, f->kids[0]); };
            if (any_in(o.yes, forces_inner)) return Tri::no;
            if (any_in(o.maybe, forces_inner)) return Tri::unknown;
            return Tri::yes;
        }
        case Node::Kind::quant: {
            auto witnessed = [&](std::size_t b) {
                for (std::size_t d : o.space.extensions(b))
                    for (int m = 0; m < o.space.at(d).q.rank(); ++m)
                        if (in_space(d, subst(f->kids[0], f->var, "G" + std::to_string(m)))) return true;
                return false;
            };
            bool sure = std::all_of(o.yes.begin(), o.yes.end(), witnessed);
            if (!sure) return Tri::no;
            return std::all_of(o.maybe.begin(), o.maybe.end(), witnessed) ? Tri::yes : Tri::unknown;
        }
        case Node::Kind::mag: not_in_formula("mag");
        default: not_in_formula("atom '" + formula::print(f) + "'");
    }
}

Verdict forces_clausal(const Condition& c, const Formula& phi, Space& space) {
    check_rank(c, phi);
    if (auto idx = space.find(c)) return space.decide(*idx, phi);
    Outside o{c, space, {}, {}};
    for (std::size_t b = 0; b < space.size(); ++b) {
        Tri e = extends(space.at(b), c);
        if (e == Tri::yes) o.yes.push_back(b);
        else if (e == Tri::unknown) o.maybe.push_back(b);
    }
    auto in_space = [&](std::size_t b, const Formula& g) { return space.forces(b, g); };
    if (forced_outside(o, phi, in_space) == Tri::yes) return Verdict::forced;
    if (forced_outside(o, formula::make_not(phi), in_space) == Tri::yes) return Verdict::refuted;
    return Verdict::unknown;
}

// Values for rank k: nonempty sets of k-tuples over {0, 1} with at most one 1.
static std::vector<FiberValue> palette(int k) {
    std::vector<Tuple> tuples;
    tuples.emplace_back(k, HFSet());
    for (int j = 0; j < k; ++j) {
        Tuple t(k, HFSet());
        t[j] = HFSet::numeral(1);
        tuples.push_back(t);
    }
    std::vector<FiberValue> out;
    for (std::size_t mask = 1; mask < (std::size_t{1} << tuples.size()); ++mask) {
        std::vector<Tuple> chosen;
        for (std::size_t j = 0; j < tuples.size(); ++j)
            if (mask >> j & 1) chosen.push_back(tuples[j]);
        out.push_back(make_value(std::move(chosen)));
    }
    return out;
}

Space enumerate_space(const SpaceCaps& caps, int universe_rank) {
    long lcm_all = 1;
    for (long L = 1; L <= caps.period; ++L) lcm_all = std::lcm(lcm_all, L);
    long W = caps.prelude + lcm_all;

    std::vector<IndexSet> ps;
    std::set<std::vector<bool>> seen_p;
    for (int P = 0; P <= caps.prelude; ++P)
        for (int L = 1; L <= caps.period; ++L)
            for (long bits = 0; bits < (1L << (P + L)); ++bits) {
                std::vector<bool> pre, per;
                for (int j = 0; j < P; ++j) pre.push_back(bits >> j & 1);
                for (int j = 0; j < L; ++j) per.push_back(bits >> (P + j) & 1);
                IndexSet p(pre, per);
                if (!p.unbounded()) continue;
                std::vector<bool> key;
                for (long i = 0; i < W; ++i) key.push_back(p.contains(i));
                if (seen_p.insert(key).second) ps.push_back(p);
            }

    std::vector<Fiber> qs;
    for (int k = 0; k <= caps.rank; ++k) {
        auto pal = palette(k);
        std::set<std::vector<std::size_t>> seen_q;
        std::size_t n = pal.size();
        for (int P = 0; P <= caps.prelude; ++P)
            for (int L = 1; L <= caps.period; ++L) {
                std::size_t total = 1;
                for (int j = 0; j < P + L; ++j) total *= n;
                for (std::size_t code = 0; code < total; ++code) {
                    std::vector<std::size_t> idx;
                    for (std::size_t c = code, j = 0; j < static_cast<std::size_t>(P + L); ++j, c /= n) idx.push_back(c % n);
                    std::vector<std::size_t> key;
                    for (long i = 0; i < W; ++i) key.push_back(i < P ? idx[i] : idx[P + (i - P) % L]);
                    if (!seen_q.insert(key).second) continue;
                    std::vector<FiberValue> pre, per;
                    for (int j = 0; j < P; ++j) pre.push_back(pal[idx[j]]);
                    for (int j = 0; j < L; ++j) per.push_back(pal[idx[P + j]]);
                    qs.push_back(tabular(k, std::move(pre), std::move(per)));
                }
            }
    }

    std::vector<Condition> conds;
    conds.reserve(ps.size() * qs.size());
    for (const auto& p : ps)
        for (const auto& q : qs) conds.emplace_back(p, q);
    return Space(std::move(conds), universe_rank);
}

}  // namespace hyperlab::forcing
