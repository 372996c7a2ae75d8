#include "qpp/bounds.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qpp {

Rational coding_rate(std::uint32_t length, int memory) {
    if (length == 0) throw std::invalid_argument("length must be positive");
    const std::int64_t num = length;
    const std::int64_t den = 3ll * length + 4ll * memory;
    const std::int64_t g = std::gcd(num, den);
    return {num / g, den / g};
}

namespace {

double bound_sum(const DistanceSpectrum& spectrum, double rate, double snr_db, bool per_bit,
                 std::uint32_t length) {
    if (spectrum.truncated)
        throw std::invalid_argument("refusing to bound a truncated spectrum");
    const double snr = std::pow(10.0, snr_db / 10.0);
    const double base = 1.0 / (1.0 + rate * snr);
    double sum = 0.0;
    for (const auto& t : spectrum.terms) {
        const double mult = per_bit ? static_cast<double>(t.input_weight_sum) / length
                                    : static_cast<double>(t.multiplicity);
        sum += mult * std::pow(base, static_cast<double>(t.distance));
    }
    return 0.5 * sum;
}

}  // namespace

double tub_ber(const DistanceSpectrum& spectrum, std::uint32_t length, double rate,
               double snr_db) {
    return bound_sum(spectrum, rate, snr_db, true, length);
}

double tub_fer(const DistanceSpectrum& spectrum, double rate, double snr_db) {
    return bound_sum(spectrum, rate, snr_db, false, 1);
}

}  // namespace qpp
