#pragma once

#include "hyperlab/formula.hpp"
#include "hyperlab/hfset.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hyperlab::forcing {

enum class Tri { no, yes, unknown };
const char* to_string(Tri t);

inline constexpr int kUniverseRank = 3;

// ---- index sets ----

// Eventually periodic subset of N: membership of i >= prelude.size() is
// period[(i - prelude.size()) % period.size()].
class IndexSet {
public:
    IndexSet(std::vector<bool> prelude, std::vector<bool> period);
    static IndexSet all();
    static IndexSet residue(long modulus, long r);  // {i : i % modulus == r}
    static IndexSet from_bits(std::string_view prelude, std::string_view period);
    // Bits [0, start) explicit, then period bits read at [start, start + len).
    static IndexSet tabulate(const std::function<bool(long)>& member, long start, long len);

    bool contains(long i) const;
    bool unbounded() const;
    long start() const { return static_cast<long>(prelude_.size()); }
    long period() const { return static_cast<long>(period_.size()); }
    const std::vector<bool>& prelude_bits() const { return prelude_; }
    const std::vector<bool>& period_bits() const { return period_; }

    long least() const;                 // throws on the empty set
    long least_at_or_after(long i) const;  // requires unbounded
    IndexSet without(long i) const;
    long count_below(long i) const;     // |{j in p : j < i}|
    long nth(long k) const;             // k-th member (0-based), requires unbounded

    IndexSet normalized() const;  // shortest prelude and period
    bool operator==(const IndexSet& o) const;  // extensional

private:
    std::vector<bool> prelude_, period_;
};

bool subset(const IndexSet& a, const IndexSet& b);
IndexSet intersect(const IndexSet& a, const IndexSet& b);
IndexSet difference(const IndexSet& a, const IndexSet& b);
IndexSet unite(const IndexSet& a, const IndexSet& b);
// {p.nth(j) : j in positions}
IndexSet image(const IndexSet& p, const IndexSet& positions);

std::string to_string(const IndexSet& p);  // "prelude=110 period=10"
IndexSet parse_index_set(std::string_view text);

// ---- rule terms over the index i ----

struct HTermNode;
using HTerm = std::shared_ptr<const HTermNode>;

struct HTermNode {
    enum class Kind { constant, vn, set, unite };
    Kind kind;
    HFSet value;             // constant
    long offset = 0;         // vn: vN(i + offset), the empty set when i + offset < 0
    std::vector<HTerm> args;  // set elements, union operands
};

HTerm hconst(HFSet v);
HTerm hvn(long offset = 0);
HTerm hset(std::vector<HTerm> elems);
HTerm hunion(HTerm a, HTerm b);
HFSet eval(const HTerm& t, long i);
bool mentions_index(const HTerm& t);
std::string to_string(const HTerm& t);

using Tuple = std::vector<HFSet>;
using FiberValue = std::vector<Tuple>;  // sorted, duplicate-free, nonempty
using TupleTemplate = std::vector<HTerm>;
using ValueTemplate = std::vector<TupleTemplate>;

FiberValue make_value(std::vector<Tuple> tuples);
std::string to_string(const FiberValue& v);
FiberValue empty_tuple_value(int k);  // {<0,...,0>}, the value used off the domain

// ---- fibers ----

class FiberImpl;

class Fiber {
public:
    explicit Fiber(std::shared_ptr<const FiberImpl> impl) : impl_(std::move(impl)) {}

    int rank() const;
    FiberValue at(long i) const;
    // From horizon(R) on, every quantifier-free fact about the tuples that
    // only involves constants of rank <= R repeats with period().
    long horizon(int R) const;
    long period() const;
    bool generative() const;  // values grow with i
    // Greatest index where x can occur in a rank-1 value, when the rules certify one.
    std::optional<long> occurrence_bound(HFSet x) const;
    std::string describe() const;

private:
    std::shared_ptr<const FiberImpl> impl_;
};

Fiber tabular(int rank, std::vector<FiberValue> prelude, std::vector<FiberValue> period);
Fiber templated(int rank, std::vector<ValueTemplate> prelude, std::vector<ValueTemplate> period);
Fiber one_point_one();  // rank 0, value {<>} everywhere
// q'(i) = {t ^ <col(i)> : t in q(i)}
Fiber append_column(const Fiber& q, HTerm col);
// On dom: tuples of q(i) passing keep (must stay nonempty); elsewhere {0_k}.
// rank_hint bounds the ranks of constants keep looks at.
Fiber filter(const Fiber& q, const IndexSet& dom, std::function<bool(const Tuple&)> keep, int rank_hint,
             std::string note);
// Stage j on [bounds[j], bounds[j+1]); the last stage from bounds.back() on.
Fiber staircase(std::vector<long> bounds, std::vector<Fiber> stages);

struct Reindexing {
    IndexSet dom, target;  // gamma maps dom onto target increasingly, 0 elsewhere
    long operator()(long i) const;
};

Fiber restrict_rank(const Fiber& q, int l);
Fiber project(const Fiber& q, const std::vector<int>& sigma);
Fiber reindex(const Fiber& q, const Reindexing& gamma);
Fiber amalgamate(const Fiber& q, const Reindexing& gamma);

// Materializes a non-generative fiber as a table.
Fiber materialize(const Fiber& q);
std::string to_string(const Fiber& q);

// ---- conditions ----

struct Condition {
    IndexSet p;
    Fiber q;
    Condition(IndexSet p_, Fiber q_);
};

std::string to_string(const Condition& c);
// "p: prelude=110 period=10" and "q: rank=2 prelude=[...] period=[...]" lines.
Condition parse_condition(std::string_view text);

// Window [start, start + 2*period) covering everything decisions look at.
struct Window {
    long start, period;
};
Window window(const Condition& c, int R);

Tri extends(const Condition& c2, const Condition& c1);

// ---- forcing ----

// Names are the variables G0, G1, ...; numerals and {...} literals are constants.
int max_name_index(const formula::Formula& f);  // -1 when nameless

Tri forces_los(const Condition& c, const formula::Formula& phi, int universe_rank = kUniverseRank);

enum class Verdict { forced, refuted, unknown };
const char* to_string(Verdict v);

struct SpaceCaps {
    int prelude = 2;
    int period = 2;
    int rank = 2;
};

// Finite set of tabular conditions with a fast extension test. Clauses that
// quantify over extensions range over this set only.
class Space {
public:
    explicit Space(std::vector<Condition> conds, int universe_rank = kUniverseRank);

    std::size_t size() const { return conds_.size(); }
    const Condition& at(std::size_t i) const { return conds_[i]; }
    int universe_rank() const { return universe_rank_; }

    bool extends(std::size_t b, std::size_t a) const;  // b <= a
    std::vector<std::size_t> extensions(std::size_t a) const;
    std::optional<std::size_t> find(const Condition& c) const;

    // c forces phi, relative to this space. Memoized per formula text.
    bool forces(std::size_t c, const formula::Formula& phi);
    Verdict decide(std::size_t c, const formula::Formula& phi);

private:
    struct Compiled {
        std::uint64_t pmask;
        int rank;
        std::vector<std::uint16_t> vids;
    };
    using Bits = std::vector<std::uint64_t>;

    std::vector<Condition> conds_;
    int universe_rank_;
    long start_ = 0, period_ = 1;
    std::vector<Compiled> compiled_;
    std::vector<FiberValue> values_;
    std::vector<std::vector<std::int8_t>> contain_;  // [vb][va]: prefixes of vb lie in va
    std::unordered_map<std::string, std::size_t> index_;
    // Extension only looks at p and the periodic values, so conditions
    // sharing that signature share their extension set.
    std::vector<std::size_t> sig_of_;
    std::vector<std::size_t> sig_rep_;
    std::vector<Bits> sig_ext_;
    std::unordered_map<std::string, Bits> memo_;

    std::string key(const Compiled& c) const;
    bool fast_extends(const Compiled& b, const Compiled& a) const;
    const Bits& forced_set(const formula::Formula& phi);
    Bits compute_forced(const formula::Formula& phi);
    friend Verdict forces_clausal(const Condition& c, const formula::Formula& phi, Space& space);
};

// Every condition within the caps; fiber values drawn from a fixed palette of
// tuples over {0, 1}.
Space enumerate_space(const SpaceCaps& caps, int universe_rank = kUniverseRank);

// Literal clause evaluation; c need not belong to the space.
Verdict forces_clausal(const Condition& c, const formula::Formula& phi, Space& space);

// ---- constructions ----

struct Named {
    Condition cond;
    int m;  // index of the new name
};

Named fix_constant(const Condition& c, HFSet z);
Named diag_name(const Condition& c);
Condition decide_membership(const Condition& c, int m, long B);
std::vector<int> standard_part_name(const Condition& c, int m, long B);

struct DenseRule {
    std::string description;
    std::function<Condition(const Condition&)> finder;
};
std::vector<Condition> pseudo_generic(const Condition& start, const std::vector<DenseRule>& rules);

// ---- simplified forcing ----

struct SimpleName {
    std::vector<HFSet> prelude, period;
    HFSet at(long i) const;
    static SimpleName constant(HFSet v) { return {{}, {v}}; }
};
SimpleName parse_simple_name(std::string_view text);  // "prelude=[0] period=[0,1]"
std::string to_string(const SimpleName& f);
SimpleName compose(const SimpleName& f, const Reindexing& gamma);

// Atoms f = g, f in g, st(f) (and their negations) over named functions.
bool simplified_forces(const IndexSet& p, const formula::Formula& atom, const std::map<std::string, SimpleName>& names);

// ---- fiber splitting ----

struct SplitResult {
    IndexSet p1, p2;
    std::vector<long> n, alpha;  // positions within p
    std::vector<std::pair<long, std::vector<HFSet>>> s;  // index -> chosen subset
    bool disjoint = false;        // checked over the computed stages
};

SplitResult split_fibers(const Fiber& r, const IndexSet& p, int stages = 24);

}  // namespace hyperlab::forcing
