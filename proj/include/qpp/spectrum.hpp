#pragma once

#include <cstdint>
#include <vector>

#include "qpp/polynomial.hpp"
#include "qpp/turbo.hpp"

namespace qpp {

struct SpectrumTerm {
    std::uint32_t distance = 0;
    std::uint64_t multiplicity = 0;      // codewords at this distance
    std::uint64_t input_weight_sum = 0;  // summed information weight of those codewords

    bool operator==(const SpectrumTerm&) const = default;
};

// Leading terms of the codeword-weight distribution of the turbo code built
// on one interleaver, restricted to information patterns of weight <=
// input_weight_cap. terms is sorted by distance; when truncated is false
// every listed term is exact and no distance below the last listed one is
// missing.
struct DistanceSpectrum {
    std::vector<SpectrumTerm> terms;
    int num_terms_requested = 0;
    int input_weight_cap = 0;
    bool truncated = false;            // node budget ran out; terms may undercount
    std::uint32_t threshold_used = 0;  // distances were enumerated up to this weight
    std::uint64_t nodes_visited = 0;

    bool operator==(const DistanceSpectrum& o) const {
        return terms == o.terms && input_weight_cap == o.input_weight_cap &&
               truncated == o.truncated;
    }
};

struct SpectrumOptions {
    std::uint64_t node_budget = 20'000'000'000ull;  // ceiling per enumeration task
    int jobs = 1;
    // Start the distance-threshold escalation at least here (capped by the
    // code's distance ceiling). Lets a caller that already knows a lower
    // bound on the minimum distance skip the cheap early passes.
    std::uint32_t threshold_floor = 0;
};

// Exact leading spectrum terms by depth-first search over information
// patterns in order of ascending one-positions, pruned with precomputed
// per-state completion-cost bounds, with iterative threshold deepening until
// num_terms distinct distances are complete. Deterministic for fixed inputs
// regardless of jobs.
DistanceSpectrum compute_spectrum(const Permutation& pi, const RscSpec& rsc, int num_terms,
                                  int input_weight_cap = 10, const SpectrumOptions& opts = {});

// Independent check: encodes every information pattern of weight 1 ..
// max_input_weight through the full turbo encoder and tallies codeword
// weights. Returns the complete tally (all distances seen). Throws
// BudgetExceeded up front when sum over w of C(L, w) exceeds max_patterns.
DistanceSpectrum spectrum_oracle(const Permutation& pi, const RscSpec& rsc, int max_input_weight,
                                 std::uint64_t max_patterns = 20'000'000);

}  // namespace qpp
