#include "hyperlab/error.hpp"
#include "hyperlab/forcing.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace hyperlab::forcing {

const char* to_string(Tri t) {
    switch (t) {
        case Tri::no: return "no";
        case Tri::yes: return "yes";
        case Tri::unknown: return "unknown";
    }
    return "?";
}

IndexSet::IndexSet(std::vector<bool> prelude, std::vector<bool> period)
    : prelude_(std::move(prelude)), period_(std::move(period)) {
    if (period_.empty()) throw DomainError("empty-period", "index set needs a nonempty period");
}

IndexSet IndexSet::all() { return IndexSet({}, {true}); }

IndexSet IndexSet::residue(long modulus, long r) {
    if (modulus <= 0 || r < 0 || r >= modulus) throw DomainError("bad-residue", "r must lie in [0, modulus)");
    std::vector<bool> per(modulus, false);
    per[r] = true;
    return IndexSet({}, std::move(per));
}

IndexSet IndexSet::from_bits(std::string_view prelude, std::string_view period) {
    auto bits = [](std::string_view s) {
        std::vector<bool> out;
        for (char c : s) {
            if (c != '0' && c != '1') throw SyntaxError(std::string("bad bit '") + c + "'", 0);
            out.push_back(c == '1');
        }
        return out;
    };
    return IndexSet(bits(prelude), bits(period));
}

IndexSet IndexSet::tabulate(const std::function<bool(long)>& member, long start, long len) {
    std::vector<bool> pre, per;
    for (long i = 0; i < start; ++i) pre.push_back(member(i));
    for (long i = start; i < start + len; ++i) per.push_back(member(i));
    return IndexSet(std::move(pre), std::move(per));
}

bool IndexSet::contains(long i) const {
    if (i < 0) return false;
    if (i < start()) return prelude_[i];
    return period_[(i - start()) % period()];
}

bool IndexSet::unbounded() const { return std::find(period_.begin(), period_.end(), true) != period_.end(); }

long IndexSet::least() const {
    for (long i = 0; i < start() + period(); ++i)
        if (contains(i)) return i;
    throw DomainError("empty-index-set", "no least element");
}

long IndexSet::least_at_or_after(long i) const {
    if (!unbounded()) throw DomainError("bounded-index-set", "no members beyond the prelude");
    while (!contains(i)) ++i;
    return i;
}

IndexSet IndexSet::without(long i) const {
    std::vector<bool> pre = prelude_;
    std::vector<bool> per = period_;
    // Unroll the period until i falls inside the prelude.
    while (static_cast<long>(pre.size()) <= i) {
        pre.push_back(per.front());
        std::rotate(per.begin(), per.begin() + 1, per.end());
    }
    pre[i] = false;
    return IndexSet(std::move(pre), std::move(per));
}

long IndexSet::count_below(long i) const {
    long n = 0;
    long lim = std::min(i, start());
    for (long j = 0; j < lim; ++j) n += prelude_[j];
    if (i <= start()) return n;
    long per_count = std::count(period_.begin(), period_.end(), true);
    long rel = i - start();
    n += rel / period() * per_count;
    for (long j = 0; j < rel % period(); ++j) n += period_[j];
    return n;
}

long IndexSet::nth(long k) const {
    if (!unbounded()) throw DomainError("bounded-index-set", "nth member of a finite set");
    long pre_count = std::count(prelude_.begin(), prelude_.end(), true);
    if (k < pre_count) {
        for (long i = 0;; ++i)
            if (prelude_[i] && k-- == 0) return i;
    }
    k -= pre_count;
    long per_count = std::count(period_.begin(), period_.end(), true);
    long base = start() + k / per_count * period();
    k %= per_count;
    for (long j = 0;; ++j)
        if (period_[j] && k-- == 0) return base + j;
}

IndexSet IndexSet::normalized() const {
    std::vector<bool> per = period_;
    long L = period();
    for (long d = 1; d <= L; ++d) {
        if (L % d) continue;
        bool ok = true;
        for (long j = d; j < L && ok; ++j) ok = per[j] == per[j - d];
        if (ok) {
            per.resize(d);
            break;
        }
    }
    std::vector<bool> pre = prelude_;
    while (!pre.empty() && pre.back() == per.back()) {
        pre.pop_back();
        std::rotate(per.rbegin(), per.rbegin() + 1, per.rend());
    }
    return IndexSet(std::move(pre), std::move(per));
}

namespace {

long window_end(const IndexSet& a, const IndexSet& b) {
    return std::max(a.start(), b.start()) + std::lcm(a.period(), b.period());
}

IndexSet combine(const IndexSet& a, const IndexSet& b, bool (*op)(bool, bool)) {
    long start = std::max(a.start(), b.start());
    return IndexSet::tabulate([&](long i) { return op(a.contains(i), b.contains(i)); }, start,
                              std::lcm(a.period(), b.period()));
}

}  // namespace

bool IndexSet::operator==(const IndexSet& o) const {
    for (long i = 0; i < window_end(*this, o); ++i)
        if (contains(i) != o.contains(i)) return false;
    return true;
}

bool subset(const IndexSet& a, const IndexSet& b) {
    for (long i = 0; i < window_end(a, b); ++i)
        if (a.contains(i) && !b.contains(i)) return false;
    return true;
}

IndexSet intersect(const IndexSet& a, const IndexSet& b) {
    return combine(a, b, [](bool x, bool y) { return x && y; });
}
IndexSet difference(const IndexSet& a, const IndexSet& b) {
    return combine(a, b, [](bool x, bool y) { return x && !y; });
}
IndexSet unite(const IndexSet& a, const IndexSet& b) {
    return combine(a, b, [](bool x, bool y) { return x || y; });
}

IndexSet image(const IndexSet& p, const IndexSet& positions) {
    if (!p.unbounded()) throw DomainError("bounded-index-set", "image through a finite set");
    // Past both preludes, p.period * positions.period steps move the position
    // count by a multiple of positions.period.
    long start = p.start();
    if (positions.start() > 0) start = std::max(start, p.nth(positions.start() - 1) + 1);
    return IndexSet::tabulate([&](long i) { return p.contains(i) && positions.contains(p.count_below(i)); }, start,
                              p.period() * positions.period());
}

std::string to_string(const IndexSet& p) {
    std::string s = "prelude=";
    for (bool b : p.prelude_bits()) s += b ? '1' : '0';
    s += " period=";
    for (bool b : p.period_bits()) s += b ? '1' : '0';
    return s;
}

IndexSet parse_index_set(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string tok, pre, per;
    bool have_period = false;
    while (in >> tok) {
        if (tok == "all") return IndexSet::all();
        if (tok == "evens") return IndexSet::residue(2, 0);
        if (tok == "odds") return IndexSet::residue(2, 1);
        if (tok.rfind("prelude=", 0) == 0) pre = tok.substr(8);
        else if (tok.rfind("period=", 0) == 0) per = tok.substr(7), have_period = true;
        else throw SyntaxError("unexpected '" + tok + "' in index set", 0);
    }
    if (!have_period || per.empty()) throw SyntaxError("index set needs period=<bits>", 0);
    return IndexSet::from_bits(pre, per);
}

// ---- rule terms ----

HTerm hconst(HFSet v) {
    HTermNode n;
    n.kind = HTermNode::Kind::constant;
    n.value = v;
    return std::make_shared<const HTermNode>(std::move(n));
}

HTerm hvn(long offset) {
    HTermNode n;
    n.kind = HTermNode::Kind::vn;
    n.offset = offset;
    return std::make_shared<const HTermNode>(std::move(n));
}

HTerm hset(std::vector<HTerm> elems) {
    HTermNode n;
    n.kind = HTermNode::Kind::set;
    n.args = std::move(elems);
    return std::make_shared<const HTermNode>(std::move(n));
}

HTerm hunion(HTerm a, HTerm b) {
    HTermNode n;
    n.kind = HTermNode::Kind::unite;
    n.args = {std::move(a), std::move(b)};
    return std::make_shared<const HTermNode>(std::move(n));
}

HFSet eval(const HTerm& t, long i) {
    switch (t->kind) {
        case HTermNode::Kind::constant: return t->value;
        case HTermNode::Kind::vn: return i + t->offset < 0 ? HFSet() : HFSet::numeral(i + t->offset);
        case HTermNode::Kind::set: {
            std::vector<HFSet> elems;
            for (const auto& a : t->args) elems.push_back(eval(a, i));
            return HFSet::make(std::move(elems));
        }
        case HTermNode::Kind::unite: return hf_union(eval(t->args[0], i), eval(t->args[1], i));
    }
    return HFSet();
}

bool mentions_index(const HTerm& t) {
    if (t->kind == HTermNode::Kind::vn) return true;
    for (const auto& a : t->args)
        if (mentions_index(a)) return true;
    return false;
}

std::string to_string(const HTerm& t) {
    switch (t->kind) {
        case HTermNode::Kind::constant: return to_string(t->value);
        case HTermNode::Kind::vn:
            if (t->offset == 0) return "vN(i)";
            return "vN(i" + std::string(t->offset > 0 ? "+" : "-") + std::to_string(std::labs(t->offset)) + ")";
        case HTermNode::Kind::set: {
            std::string s = "{";
            for (std::size_t j = 0; j < t->args.size(); ++j) s += (j ? "," : "") + to_string(t->args[j]);
            return s + "}";
        }
        case HTermNode::Kind::unite: return "U(" + to_string(t->args[0]) + "," + to_string(t->args[1]) + ")";
    }
    return "?";
}

FiberValue make_value(std::vector<Tuple> tuples) {
    if (tuples.empty()) throw DomainError("empty-fiber-value", "fiber values must be nonempty");
    std::sort(tuples.begin(), tuples.end());
    tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
    std::size_t k = tuples.front().size();
    for (const auto& t : tuples)
        if (t.size() != k) throw DomainError("ragged-tuples", "tuples of one value must share a length");
    return tuples;
}

std::string to_string(const FiberValue& v) {
    std::string s = "{";
    for (std::size_t j = 0; j < v.size(); ++j) {
        s += j ? ",(" : "(";
        for (std::size_t c = 0; c < v[j].size(); ++c) s += (c ? "," : "") + to_string(v[j][c]);
        s += ")";
    }
    return s + "}";
}

FiberValue empty_tuple_value(int k) { return {Tuple(static_cast<std::size_t>(k), HFSet())}; }

}  // namespace hyperlab::forcing
