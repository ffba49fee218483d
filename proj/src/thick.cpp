#include "hyperlab/thick.hpp"

#include "hyperlab/error.hpp"

#include <algorithm>
#include <cctype>

namespace hyperlab::thick {

struct FinFamily::Node {
    Kind kind;
    long value = 0;  // designated element or cardinality threshold
    std::vector<std::shared_ptr<const Node>> kids;
};

namespace {

std::shared_ptr<const FinFamily::Node> leaf(FinFamily::Kind k, long v) {
    auto n = std::make_shared<FinFamily::Node>();
    n->kind = k;
    n->value = v;
    return n;
}

}  // namespace

FinFamily FinFamily::contains(long x) {
    if (x < 0) throw DomainError("bad-element", "elements are naturals");
    return FinFamily(leaf(Kind::contains, x));
}
FinFamily FinFamily::at_least(long c) { return FinFamily(leaf(Kind::at_least, c)); }
FinFamily FinFamily::at_most(long c) { return FinFamily(leaf(Kind::at_most, c)); }
FinFamily FinFamily::all() { return FinFamily(leaf(Kind::all, 0)); }
FinFamily FinFamily::none() { return FinFamily(leaf(Kind::none, 0)); }

FinFamily operator&(const FinFamily& a, const FinFamily& b) {
    auto n = std::make_shared<FinFamily::Node>();
    n->kind = FinFamily::Kind::and_;
    n->kids = {a.node_, b.node_};
    return FinFamily(n);
}
FinFamily operator|(const FinFamily& a, const FinFamily& b) {
    auto n = std::make_shared<FinFamily::Node>();
    n->kind = FinFamily::Kind::or_;
    n->kids = {a.node_, b.node_};
    return FinFamily(n);
}
FinFamily operator!(const FinFamily& a) {
    auto n = std::make_shared<FinFamily::Node>();
    n->kind = FinFamily::Kind::not_;
    n->kids = {a.node_};
    return FinFamily(n);
}

namespace {

bool member_at(const FinFamily::Node& n, const std::set<long>& d, long size) {
    using K = FinFamily::Kind;
    switch (n.kind) {
        case K::contains: return d.count(n.value) > 0;
        case K::at_least: return size >= n.value;
        case K::at_most: return size <= n.value;
        case K::all: return true;
        case K::none: return false;
        case K::and_: return member_at(*n.kids[0], d, size) && member_at(*n.kids[1], d, size);
        case K::or_: return member_at(*n.kids[0], d, size) || member_at(*n.kids[1], d, size);
        case K::not_: return !member_at(*n.kids[0], d, size);
    }
    return false;
}

void collect(const FinFamily::Node& n, std::set<long>& d, long& cmax) {
    if (n.kind == FinFamily::Kind::contains) d.insert(n.value);
    if (n.kind == FinFamily::Kind::at_least || n.kind == FinFamily::Kind::at_most) cmax = std::max(cmax, n.value);
    for (const auto& k : n.kids) collect(*k, d, cmax);
}

std::string show(const FinFamily::Node& n) {
    using K = FinFamily::Kind;
    switch (n.kind) {
        case K::contains: return "contains(" + std::to_string(n.value) + ")";
        case K::at_least: return "atleast(" + std::to_string(n.value) + ")";
        case K::at_most: return "atmost(" + std::to_string(n.value) + ")";
        case K::all: return "all";
        case K::none: return "none";
        case K::and_: return "(" + show(*n.kids[0]) + " & " + show(*n.kids[1]) + ")";
        case K::or_: return "(" + show(*n.kids[0]) + " | " + show(*n.kids[1]) + ")";
        case K::not_: return "!" + show(*n.kids[0]);
    }
    return "?";
}

}  // namespace

bool FinFamily::member(const std::set<long>& designated_part, long size) const {
    return member_at(*node_, designated_part, size);
}

bool FinFamily::member(const std::set<long>& a) const {
    std::set<long> d;
    for (long x : designated())
        if (a.count(x)) d.insert(x);
    return member(d, static_cast<long>(a.size()));
}

std::set<long> FinFamily::designated() const {
    std::set<long> d;
    long c = 0;
    collect(*node_, d, c);
    return d;
}

long FinFamily::max_threshold() const {
    std::set<long> d;
    long c = 0;
    collect(*node_, d, c);
    return c;
}

std::string FinFamily::to_string() const { return show(*node_); }

namespace {

class FamilyParser {
public:
    explicit FamilyParser(std::string_view s) : s_(s) {}

    FinFamily parse() {
        FinFamily f = expr();
        skip();
        if (i_ != s_.size()) throw SyntaxError("trailing input in family", i_);
        return f;
    }

private:
    std::string_view s_;
    std::size_t i_ = 0;

    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eat(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) return ++i_, true;
        return false;
    }
    bool word(std::string_view w) {
        skip();
        if (s_.substr(i_, w.size()) != w) return false;
        std::size_t end = i_ + w.size();
        if (end < s_.size() && std::isalnum(static_cast<unsigned char>(s_[end]))) return false;
        i_ = end;
        return true;
    }
    long arg() {
        if (!eat('(')) throw SyntaxError("expected '('", i_);
        skip();
        if (i_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[i_]))) throw SyntaxError("expected a number", i_);
        long n = 0;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) n = n * 10 + (s_[i_++] - '0');
        if (!eat(')')) throw SyntaxError("expected ')'", i_);
        return n;
    }
    FinFamily expr() {
        FinFamily f = term();
        while (eat('|')) f = f | term();
        return f;
    }
    FinFamily term() {
        FinFamily f = factor();
        while (eat('&')) f = f & factor();
        return f;
    }
    FinFamily factor() {
        if (eat('!')) return !factor();
        if (eat('(')) {
            FinFamily f = expr();
            if (!eat(')')) throw SyntaxError("expected ')'", i_);
            return f;
        }
        if (word("contains")) return FinFamily::contains(arg());
        if (word("atleast")) return FinFamily::at_least(arg());
        if (word("atmost")) return FinFamily::at_most(arg());
        if (word("all")) return FinFamily::all();
        if (word("none")) return FinFamily::none();
        throw SyntaxError("expected a family atom", i_);
    }
};

std::vector<std::set<long>> subsets_up_to(const std::vector<long>& d, long max_size) {
    std::vector<std::set<long>> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << d.size()); ++mask) {
        std::set<long> s;
        for (std::size_t j = 0; j < d.size(); ++j)
            if (mask >> j & 1) s.insert(d[j]);
        if (static_cast<long>(s.size()) <= max_size) out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

FinFamily parse_family(std::string_view text) { return FamilyParser(text).parse(); }

std::vector<NuResult> thickness_nu(const FinFamily& fam, long m_max) {
    if (m_max < 0 || m_max > 16) throw DomainError("bad-bound", "m_max must lie in 0..16");
    std::set<long> dset = fam.designated();
    if (dset.size() > 16) throw DomainError("too-many-designated", "at most 16 designated elements");
    std::vector<long> d(dset.begin(), dset.end());
    long cmax = fam.max_threshold();
    auto all_s = subsets_up_to(d, static_cast<long>(d.size()));

    // Membership only sees (a ∩ D, |a|), so a is determined up to symmetry by
    // T = a ∩ D and its count of fresh elements; past max(cmax+1, |S|+fresh)
    // further sizes change nothing.
    auto least_size = [&](const std::set<long>& T, long fresh) -> std::optional<long> {
        std::optional<long> best;
        for (const auto& S : all_s) {
            if (!std::includes(S.begin(), S.end(), T.begin(), T.end())) continue;
            long lo = static_cast<long>(S.size()) + fresh;
            long hi = std::max(lo, cmax + 1);
            for (long s = lo; s <= hi; ++s)
                if (fam.member(S, s)) {
                    if (!best || s < *best) best = s;
                    break;
                }
        }
        return best;
    };

    std::vector<NuResult> out;
    for (long m = 0; m <= m_max; ++m) {
        NuResult r{m, 0, std::nullopt};
        for (const auto& T : subsets_up_to(d, m)) {
            for (long fresh = 0; static_cast<long>(T.size()) + fresh <= m; ++fresh) {
                auto s = least_size(T, fresh);
                if (!s) {
                    std::vector<long> a(T.begin(), T.end());
                    for (long x = 0, added = 0; added < fresh; ++x)
                        if (!dset.count(x)) a.push_back(x), ++added;
                    std::sort(a.begin(), a.end());
                    r.nu.reset();
                    r.thin_witness = a;
                    break;
                }
                r.nu = std::max(*r.nu, *s);
            }
            if (r.thin_witness) break;
        }
        out.push_back(std::move(r));
    }
    return out;
}

bool thick_up_to(const FinFamily& fam, long m_max) {
    auto rs = thickness_nu(fam, m_max);
    return std::all_of(rs.begin(), rs.end(), [](const NuResult& r) { return r.nu.has_value(); });
}

DiagonalReport diagonal_thick(const std::vector<FinFamily>& chain, long m_check) {
    if (chain.empty()) throw DomainError("empty-chain", "diagonal union needs at least one family");
    long N = static_cast<long>(chain.size());

    std::set<long> dall;
    long cmax = 0;
    for (const auto& f : chain) {
        auto d = f.designated();
        dall.insert(d.begin(), d.end());
        cmax = std::max(cmax, f.max_threshold());
    }
    std::vector<long> dv(dall.begin(), dall.end());
    if (dv.size() > 16) throw DomainError("too-many-designated", "at most 16 designated elements");

    std::vector<long> guards;
    for (long m = 0; m < N; ++m) {
        auto rs = thickness_nu(chain[m], m);
        if (!rs.back().nu)
            throw DomainError("not-thick", "chain member " + std::to_string(m) + " is thin at " + std::to_string(m));
        guards.push_back(*rs.back().nu);
    }
    if (!thick_up_to(chain.back(), m_check))
        throw DomainError("not-thick", "last chain member is thin below " + std::to_string(m_check));

    long size_cap = dv.size() + cmax + 2;
    for (long g : guards) size_cap = std::max(size_cap, g + 1);
    size_cap += m_check + 1;
    auto subsets = subsets_up_to(dv, static_cast<long>(dv.size()));
    for (long m = 0; m + 1 < N; ++m)
        for (const auto& S : subsets)
            for (long s = static_cast<long>(S.size()); s <= size_cap; ++s)
                if (chain[m + 1].member(S, s) && !chain[m].member(S, s))
                    throw DomainError("not-descending", "chain member " + std::to_string(m + 1) + " leaves its predecessor");

    // Each chain member is truncated at its own guard; the last one stands for
    // the constant tail and needs no guard.
    FinFamily composite = chain.back();
    for (long m = N - 2; m >= 0; --m) composite = (chain[m] & FinFamily::at_most(guards[m])) | composite;

    DiagonalReport rep{composite, guards, thickness_nu(composite, m_check), false, {}};
    rep.thick = std::all_of(rep.check.begin(), rep.check.end(), [](const NuResult& r) { return r.nu.has_value(); });

    for (long n = 0; n < N; ++n) {
        long k = -1;
        for (long j = 0; j < n; ++j) k = std::max(k, guards[j]);
        FinFamily diff = composite & !chain[n];
        long observed = -1;
        for (const auto& S : subsets)
            for (long s = static_cast<long>(S.size()); s <= size_cap; ++s)
                if (diff.member(S, s)) observed = std::max(observed, s);
        rep.bounds.push_back({n, k, observed});
    }
    return rep;
}

}  // namespace hyperlab::thick
