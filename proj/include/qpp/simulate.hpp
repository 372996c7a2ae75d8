#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qpp/polynomial.hpp"
#include "qpp/turbo.hpp"

namespace qpp {

// BPSK over per-symbol independent Rayleigh fading plus AWGN, amplitude known
// at the receiver. snr points are information-bit Eb/N0 in dB; the noise is
// calibrated from the code rate so that transmitting unit-energy symbols
// spends Eb = 1/Rc per information bit.
struct ChannelConfig {
    std::vector<double> snr_db_points;
};

struct StopRule {
    std::uint64_t min_frame_errors = 100;
    std::uint64_t max_frames = 10'000'000;
};

struct SnrPointResult {
    double snr_db = 0.0;
    std::uint64_t frames = 0;
    std::uint64_t frame_errors = 0;
    double fer = 0.0;
    double ci95_halfwidth = 0.0;  // binomial normal approximation
    double mean_iterations = 0.0;
    bool reached_error_target = false;
};

struct SimResult {
    std::vector<SnrPointResult> points;
    std::uint64_t seed = 0;
    double rate = 0.0;
};

// Fading amplitude with E[a^2] = 1 (two Gaussian draws).
double rayleigh_amplitude(std::mt19937_64& rng);

// Per-dimension noise standard deviation for unit-energy symbols at the given
// information-bit SNR and code rate.
double noise_sigma(double snr_db, double rate);

// log P(bit=1 | y, a) - log P(bit=0 | y, a) = 2*a*y / sigma^2.
inline double llr_from_channel(double y, double amplitude, double sigma2) {
    return 2.0 * amplitude * y / sigma2;
}

// Estimates FER per SNR point: random frames through encoder, channel and
// iterative decoder until the stop rule is met, with stop decisions taken at
// fixed frame-count boundaries. Every frame is generated from its own RNG
// seeded by (seed, point index, frame index), so results are reproducible and
// independent of jobs; frames are paired across runs that share a seed.
// codec.interleaver must match poly.
SimResult simulate_fer(const QppPolynomial& poly, const TurboCodecConfig& codec,
                       const ChannelConfig& chan, const StopRule& stop, std::uint64_t seed,
                       int jobs = 1);

}  // namespace qpp
