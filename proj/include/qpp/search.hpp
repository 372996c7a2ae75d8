#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qpp/bounds.hpp"
#include "qpp/cache.hpp"
#include "qpp/polynomial.hpp"
#include "qpp/spectrum.hpp"

namespace qpp {

struct SearchConfig {
    std::uint32_t length = 0;
    double snr_db = 0.0;
    int num_terms = 0;
    int input_weight_cap = 10;
    // keep every candidate with spread >= this instead of only the maximum
    std::optional<std::uint32_t> min_spread;
    int jobs = 1;
    SpectrumOptions spectrum;

    // snr_db and num_terms filled from the built-in per-length table: listed
    // lengths get their tabulated values, others the nearest shorter listed
    // length's SNR and a term count by size bracket.
    static SearchConfig defaults_for(std::uint32_t length);
};

struct Stage1Result {
    std::vector<QppPolynomial> candidates;  // ascending (q1, q2)
    std::uint32_t max_spread = 0;
    std::uint32_t spread_floor = 0;  // threshold actually applied to keep candidates
    std::size_t valid_total = 0;     // valid polynomials in the canonical domain
    std::size_t degenerate_skipped = 0;
};

// Enumerates the canonical domain, drops polynomials whose quadratic term is
// vacuous (those duplicate plain linear interleavers and would otherwise
// dominate the spread ranking), computes every spread, and keeps the
// maximizers — or everything at or above config.min_spread when set.
// Throws std::runtime_error if nothing survives.
Stage1Result stage1_max_spread(const SearchConfig& config);

struct RankedCandidate {
    QppPolynomial poly;
    std::uint32_t spread = 0;
    DistanceSpectrum spectrum;
    double tub_ber = 0.0;
    double tub_fer = 0.0;
    bool indeterminate = false;  // spectrum hit its budget; excluded from ranking
};

struct SearchReport {
    std::uint32_t length = 0;
    double snr_db = 0.0;
    int num_terms = 0;
    int input_weight_cap = 0;
    std::optional<std::uint32_t> min_spread;
    std::uint32_t max_spread = 0;
    std::size_t valid_total = 0;
    std::size_t stage1_kept = 0;
    RankedCandidate best;
    // Polynomials sharing the minimal bound. Every canonical winner counts
    // together with its coefficient-shift twin (identical permutation), so
    // tie_count == 2 * canonical_tie_count.
    std::size_t tie_count = 0;
    std::size_t canonical_tie_count = 0;
    std::vector<QppPolynomial> ties;         // ascending; first one is best
    std::vector<QppPolynomial> indeterminate;
};

// Ranks stage-1 survivors by tub_fer at the configured SNR and spectrum
// depth. Candidates whose bound differs from the minimum by less than 1e-12
// relative are ties (identical spectra produce bit-identical bounds and so
// always tie); the tie with the smallest q1, then q2, is reported best.
// Budget-truncated candidates are flagged, not ranked; if every candidate is
// truncated, throws BudgetExceeded. Deterministic for fixed config,
// independent of jobs. cache may be null.
SearchReport stage2_min_tub_fer(const Stage1Result& stage1, const SearchConfig& config,
                                SpectrumCache* cache = nullptr);

struct ReferenceComparison {
    QppPolynomial poly;
    std::uint32_t spread = 0;
    DistanceSpectrum spectrum;
    double tub_ber = 0.0;
    double tub_fer = 0.0;
    double fer_ratio = 0.0;  // reference bound / best bound
};

// Evaluates a reference polynomial under the report's SNR and spectrum depth
// and returns its bound divided by the report's best bound.
ReferenceComparison compare_with_reference(const SearchReport& report,
                                           const QppPolynomial& reference,
                                           SpectrumCache* cache = nullptr);

// 3GPP turbo-code interleaver coefficients (f1, f2) for block lengths 40..512
// in steps of 8; nullopt for other lengths.
std::optional<QppPolynomial> lte_reference(std::uint32_t length);

}  // namespace qpp
