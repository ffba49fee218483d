#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace hyperlab::thick {

// Family of finite subsets of N given by a rule over designated elements and
// cardinality. Membership only sees a ∩ designated and |a|, so it is invariant
// under permutations fixing the designated elements.
class FinFamily {
public:
    enum class Kind { contains, at_least, at_most, all, none, and_, or_, not_ };

    static FinFamily contains(long x);
    static FinFamily at_least(long c);
    static FinFamily at_most(long c);
    static FinFamily all();
    static FinFamily none();
    friend FinFamily operator&(const FinFamily& a, const FinFamily& b);
    friend FinFamily operator|(const FinFamily& a, const FinFamily& b);
    friend FinFamily operator!(const FinFamily& a);

    // Membership of a set with the given designated part and total size.
    bool member(const std::set<long>& designated_part, long size) const;
    bool member(const std::set<long>& a) const;
    std::set<long> designated() const;
    long max_threshold() const;
    std::string to_string() const;

    struct Node;  // rule tree, defined with the evaluator

private:
    std::shared_ptr<const Node> node_;
    explicit FinFamily(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
};

// contains(x), atleast(c), atmost(c), all, none, &, |, ! and parentheses.
FinFamily parse_family(std::string_view text);

struct NuResult {
    long m;
    std::optional<long> nu;                          // least bound when thick at m
    std::optional<std::vector<long>> thin_witness;   // a with no superset in the family
};

std::vector<NuResult> thickness_nu(const FinFamily& fam, long m_max);
bool thick_up_to(const FinFamily& fam, long m_max);

struct DiffBound {
    long n;
    long k;         // guard maximum: max of nu_{p_j}(j) for j < n
    long observed;  // largest member of p \ p_n found, -1 when empty
};

struct DiagonalReport {
    FinFamily composite;
    std::vector<long> guards;  // nu_{p_m}(m)
    std::vector<NuResult> check;
    bool thick = false;
    std::vector<DiffBound> bounds;
};

DiagonalReport diagonal_thick(const std::vector<FinFamily>& chain, long m_check);

}  // namespace hyperlab::thick
