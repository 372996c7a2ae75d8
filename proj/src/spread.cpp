#include "qpp/spread.hpp"

#include <stdexcept>

namespace qpp {

std::uint32_t circular_distance(std::uint32_t a, std::uint32_t b, std::uint32_t length) {
    const std::uint32_t d = a >= b ? a - b : b - a;
    return d <= length - d ? d : length - d;
}

std::uint32_t pair_distance(const Permutation& pi, std::uint32_t i, std::uint32_t j) {
    const std::uint32_t L = pi.size();
    return circular_distance(i, j, L) + circular_distance(pi(i), pi(j), L);
}

SpreadResult spread_factor(const Permutation& pi) {
    const std::uint32_t L = pi.size();
    if (L < 2) throw std::invalid_argument("spread_factor needs at least two points");
    SpreadResult r{UINT32_MAX, {0, 0}};
    for (std::uint32_t i = 0; i + 1 < L; ++i)
        for (std::uint32_t j = i + 1; j < L; ++j)
            if (const auto d = pair_distance(pi, i, j); d < r.spread) {
                r.spread = d;
                r.witness = {i, j};
            }
    return r;
}

}  // namespace qpp
