#pragma once

#include <cstdint>

#include "qpp/spectrum.hpp"

namespace qpp {

// Code rate of the parallel concatenation with both constituents terminated:
// L information bits in 3L + 4*memory transmitted bits. Kept as an exact
// reduced fraction.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};
Rational coding_rate(std::uint32_t length, int memory = 3);

// Union bounds on fully interleaved Rayleigh-fading performance, truncated to
// the terms present in the spectrum. Each codeword at distance d contributes
// a factor (1 / (1 + Rc * snr))^d with snr the *linear* information-bit SNR:
//
//   ber <= 1/2 * sum_i (input_weight_sum_i / L) * base^d_i
//   fer <= 1/2 * sum_i multiplicity_i          * base^d_i
//
// snr_db is converted as 10^(snr_db/10). Throws std::invalid_argument on a
// truncated spectrum.
double tub_ber(const DistanceSpectrum& spectrum, std::uint32_t length, double rate,
               double snr_db);
double tub_fer(const DistanceSpectrum& spectrum, double rate, double snr_db);

}  // namespace qpp
