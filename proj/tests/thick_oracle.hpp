#pragma once

#include "hyperlab/thick.hpp"

#include <optional>
#include <set>
#include <vector>

namespace testsupport {

// Brute force over explicit subsets of a finite ground set: the designated
// elements plus enough fresh ones. Returns nullopt when some a has no
// superset in the family inside the ground set.
inline std::optional<long> brute_nu(const hyperlab::thick::FinFamily& fam, long m, long extra = 3) {
    std::vector<long> ground;
    for (long x : fam.designated()) ground.push_back(x);
    long fresh = m + fam.max_threshold() + extra;
    for (long x = 100; static_cast<long>(ground.size()) < static_cast<long>(fam.designated().size()) + fresh; ++x)
        ground.push_back(x);
    const std::size_t n = ground.size();
    std::vector<std::set<long>> sets(std::size_t{1} << n);
    std::vector<bool> in(sets.size());
    for (std::size_t mask = 0; mask < sets.size(); ++mask) {
        for (std::size_t j = 0; j < n; ++j)
            if (mask >> j & 1) sets[mask].insert(ground[j]);
        in[mask] = fam.member(sets[mask]);
    }
    long nu = 0;
    for (std::size_t a = 0; a < sets.size(); ++a) {
        if (static_cast<long>(sets[a].size()) > m) continue;
        std::optional<long> best;
        for (std::size_t b = 0; b < sets.size(); ++b)
            if ((a & b) == a && in[b] && (!best || static_cast<long>(sets[b].size()) < *best))
                best = static_cast<long>(sets[b].size());
        if (!best) return std::nullopt;
        nu = std::max(nu, *best);
    }
    return nu;
}

}  // namespace testsupport
