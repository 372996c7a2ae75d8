#pragma once

#include <cstdint>
#include <utility>

#include "qpp/polynomial.hpp"

namespace qpp {

// min(|a-b| mod L, |b-a| mod L): distance on the circle of L points.
std::uint32_t circular_distance(std::uint32_t a, std::uint32_t b, std::uint32_t length);

// Distance between the points (i, pi(i)) and (j, pi(j)) when both coordinates
// live on circles of circumference L: circular |i-j| plus circular |pi(i)-pi(j)|.
std::uint32_t pair_distance(const Permutation& pi, std::uint32_t i, std::uint32_t j);

struct SpreadResult {
    std::uint32_t spread = 0;                      // min pair_distance over all i != j
    std::pair<std::uint32_t, std::uint32_t> witness;  // lexicographically smallest argmin (i, j), i < j
};

// Exact O(L^2) scan over unordered index pairs. For any permutation the result
// is at most floor(sqrt(2L)). Requires size >= 2.
SpreadResult spread_factor(const Permutation& pi);

}  // namespace qpp
