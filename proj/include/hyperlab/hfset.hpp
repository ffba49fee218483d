#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace hyperlab {

struct HFNode;

// Hereditarily finite set. Values are hash-consed, so equality is pointer
// equality and copies are free.
class HFSet {
public:
    HFSet();  // the empty set
    static HFSet make(std::vector<HFSet> elems);  // any order, duplicates allowed
    static HFSet numeral(long n);                 // von Neumann: n = {0, ..., n-1}
    static HFSet singleton(HFSet x) { return make({x}); }
    static HFSet pair(HFSet a, HFSet b) { return make({a, b}); }

    const std::vector<HFSet>& elements() const;  // canonical order
    std::size_t size() const { return elements().size(); }
    bool empty() const { return elements().empty(); }
    bool contains(HFSet x) const;
    int rank() const;
    long as_numeral() const;  // -1 when not a von Neumann numeral
    std::size_t id() const;   // stable within a process

    bool operator==(const HFSet& o) const { return node_ == o.node_; }
    // Canonical order: rank, then size, then elementwise.
    std::strong_ordering operator<=>(const HFSet& o) const;

private:
    explicit HFSet(const HFNode* n) : node_(n) {}
    const HFNode* node_;
};

HFSet hf_union(HFSet a, HFSet b);

// Numerals print as integers, everything else in braces: {0,{1}}.
std::string to_string(HFSet s);
// Accepts braces and decimal numerals.
HFSet parse_hfset(std::string_view text);

// All sets of rank <= r (r = 3 gives 16 sets), in canonical order.
const std::vector<HFSet>& universe(int r);

}  // namespace hyperlab

template <>
struct std::hash<hyperlab::HFSet> {
    std::size_t operator()(const hyperlab::HFSet& s) const noexcept { return s.id(); }
};
