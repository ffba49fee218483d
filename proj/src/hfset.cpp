#include "hyperlab/hfset.hpp"

#include "hyperlab/error.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>

namespace hyperlab {

struct HFNode {
    std::vector<HFSet> elems;
    int rank;
    long numeral;
    std::size_t id;
};

namespace {

struct VecHash {
    std::size_t operator()(const std::vector<std::size_t>& v) const noexcept {
        std::size_t h = v.size();
        for (auto x : v) h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }
};

struct Table {
    std::mutex mu;
    std::unordered_map<std::vector<std::size_t>, std::unique_ptr<HFNode>, VecHash> nodes;
};

Table& table() {
    static Table t;
    return t;
}

}  // namespace

HFSet HFSet::make(std::vector<HFSet> elems) {
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    std::vector<std::size_t> key;
    key.reserve(elems.size());
    for (const auto& e : elems) key.push_back(e.id());

    Table& t = table();
    std::lock_guard<std::mutex> lock(t.mu);
    auto it = t.nodes.find(key);
    if (it != t.nodes.end()) return HFSet(it->second.get());

    auto node = std::make_unique<HFNode>();
    node->rank = 0;
    for (const auto& e : elems) node->rank = std::max(node->rank, e.node_->rank + 1);
    // n = {0..n-1}: elements are exactly the numerals below the size.
    node->numeral = static_cast<long>(elems.size());
    for (std::size_t i = 0; i < elems.size(); ++i)
        if (elems[i].node_->numeral != static_cast<long>(i)) node->numeral = -1;
    node->elems = std::move(elems);
    node->id = t.nodes.size();
    const HFNode* raw = node.get();
    t.nodes.emplace(std::move(key), std::move(node));
    return HFSet(raw);
}

HFSet::HFSet() : HFSet(make({})) {}

HFSet HFSet::numeral(long n) {
    if (n < 0) throw DomainError("negative-numeral", std::to_string(n));
    static std::mutex mu;
    static std::vector<HFSet> cache;
    std::lock_guard<std::mutex> lock(mu);
    if (cache.empty()) cache.push_back(HFSet());
    while (static_cast<long>(cache.size()) <= n) cache.push_back(hf_union(cache.back(), singleton(cache.back())));
    return cache[n];
}

const std::vector<HFSet>& HFSet::elements() const { return node_->elems; }
int HFSet::rank() const { return node_->rank; }
long HFSet::as_numeral() const { return node_->numeral; }
std::size_t HFSet::id() const { return node_->id; }

bool HFSet::contains(HFSet x) const {
    return std::binary_search(node_->elems.begin(), node_->elems.end(), x);
}

std::strong_ordering HFSet::operator<=>(const HFSet& o) const {
    if (node_ == o.node_) return std::strong_ordering::equal;
    if (auto c = node_->rank <=> o.node_->rank; c != 0) return c;
    if (auto c = node_->elems.size() <=> o.node_->elems.size(); c != 0) return c;
    for (std::size_t i = 0; i < node_->elems.size(); ++i)
        if (auto c = node_->elems[i] <=> o.node_->elems[i]; c != 0) return c;
    return std::strong_ordering::equal;
}

HFSet hf_union(HFSet a, HFSet b) {
    std::vector<HFSet> all = a.elements();
    all.insert(all.end(), b.elements().begin(), b.elements().end());
    return HFSet::make(std::move(all));
}

std::string to_string(HFSet s) {
    if (s.as_numeral() >= 0) return std::to_string(s.as_numeral());
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + to_string(s.elements()[i]);
    return out + "}";
}

namespace {

HFSet parse_at(std::string_view t, std::size_t& i) {
    while (i < t.size() && std::isspace(static_cast<unsigned char>(t[i]))) ++i;
    if (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) {
        long n = 0;
        while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) n = n * 10 + (t[i++] - '0');
        if (n > 64) throw SyntaxError("numeral too large", i);
        return HFSet::numeral(n);
    }
    if (i >= t.size() || t[i] != '{') throw SyntaxError("expected '{' or a numeral", i);
    ++i;
    std::vector<HFSet> elems;
    while (i < t.size() && std::isspace(static_cast<unsigned char>(t[i]))) ++i;
    if (i < t.size() && t[i] == '}') return ++i, HFSet::make({});
    for (;;) {
        elems.push_back(parse_at(t, i));
        while (i < t.size() && std::isspace(static_cast<unsigned char>(t[i]))) ++i;
        if (i < t.size() && t[i] == ',') {
            ++i;
            continue;
        }
        if (i < t.size() && t[i] == '}') {
            ++i;
            return HFSet::make(std::move(elems));
        }
        throw SyntaxError("expected ',' or '}'", i);
    }
}

}  // namespace

HFSet parse_hfset(std::string_view text) {
    std::size_t i = 0;
    HFSet s = parse_at(text, i);
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i != text.size()) throw SyntaxError("trailing input after set", i);
    return s;
}

const std::vector<HFSet>& universe(int r) {
    static std::mutex mu;
    static std::map<int, std::vector<HFSet>> cache;
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(r); it != cache.end()) return it->second;
    if (r < 0 || r > 4) throw DomainError("universe-too-large", "rank " + std::to_string(r));
    // rank <= r means every element has rank <= r-1: the power set of the level below.
    std::vector<HFSet> level = {HFSet()};
    for (int k = 1; k <= r; ++k) {
        std::vector<HFSet> next;
        std::size_t n = level.size();
        for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
            std::vector<HFSet> elems;
            for (std::size_t j = 0; j < n; ++j)
                if (mask >> j & 1) elems.push_back(level[j]);
            next.push_back(HFSet::make(std::move(elems)));
        }
        level = std::move(next);
    }
    std::sort(level.begin(), level.end());
    return cache.emplace(r, std::move(level)).first->second;
}

}  // namespace hyperlab
