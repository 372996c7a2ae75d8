#include "qpp/simulate.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "qpp/bounds.hpp"

namespace qpp {

namespace {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t frame_seed(std::uint64_t master, std::size_t point, std::uint64_t frame) {
    return splitmix64(splitmix64(master ^ (0x9E3779B97F4A7C15ull * (point + 1))) ^ frame);
}

struct FrameOutcome {
    bool error;
    int iterations;
};

FrameOutcome run_frame(TurboDecoder& dec, const TurboCodecConfig& cfg, double sigma,
                       std::uint64_t seed_value, std::vector<std::uint8_t>& bits,
                       std::vector<double>& llrs) {
    const std::uint32_t L = cfg.interleaver.size();
    std::mt19937_64 rng(seed_value);
    std::uint64_t word = 0;
    for (std::uint32_t k = 0; k < L; ++k) {
        if (k % 64 == 0) word = rng();
        bits[k] = static_cast<std::uint8_t>((word >> (k % 64)) & 1);
    }

    const auto cw = turbo_encode(bits, cfg).transmit_order();
    const double sigma2 = sigma * sigma;
    std::normal_distribution<double> gauss(0.0, 1.0);
    llrs.resize(cw.size());
    for (std::size_t i = 0; i < cw.size(); ++i) {
        const double a = rayleigh_amplitude(rng);
        const double x = cw[i] ? 1.0 : -1.0;
        const double y = a * x + sigma * gauss(rng);
        llrs[i] = llr_from_channel(y, a, sigma2);
    }

    const auto dr = dec.decode(llrs);
    bool err = false;
    for (std::uint32_t k = 0; k < L; ++k)
        if (dr.bits[k] != bits[k]) {
            err = true;
            break;
        }
    return {err, dr.iterations};
}

}  // namespace

double rayleigh_amplitude(std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double x1 = gauss(rng), x2 = gauss(rng);
    return std::sqrt(0.5 * (x1 * x1 + x2 * x2));
}

double noise_sigma(double snr_db, double rate) {
    const double ebn0 = std::pow(10.0, snr_db / 10.0);
    // Es = 1, Es/N0 = rate * Eb/N0, sigma^2 = N0/2
    return std::sqrt(1.0 / (2.0 * rate * ebn0));
}

SimResult simulate_fer(const QppPolynomial& poly, const TurboCodecConfig& codec,
                       const ChannelConfig& chan, const StopRule& stop, std::uint64_t seed,
                       int jobs) {
    if (codec.interleaver.map() != evaluate(poly))
        throw std::invalid_argument("codec interleaver does not match the polynomial");
    if (stop.max_frames == 0) throw std::invalid_argument("max_frames must be positive");

    SimResult result;
    result.seed = seed;
    result.rate = coding_rate(poly.length, codec.rsc.memory).value();

    // smaller batches for longer frames so stop checks stay frequent
    const std::uint64_t chunk =
        std::max<std::uint64_t>(512, (1u << 15) / std::max(1u, poly.length / 64));

    for (std::size_t p = 0; p < chan.snr_db_points.size(); ++p) {
        const double sigma = noise_sigma(chan.snr_db_points[p], result.rate);
        std::atomic<std::uint64_t> errors{0}, iter_sum{0};
        std::uint64_t done = 0;

        while (done < stop.max_frames) {
            const std::uint64_t batch = std::min(chunk, stop.max_frames - done);
            std::atomic<std::uint64_t> next{0};
            auto worker = [&] {
                TurboDecoder dec(codec);
                std::vector<std::uint8_t> bits(poly.length);
                std::vector<double> llrs;
                for (std::uint64_t i; (i = next.fetch_add(1)) < batch;) {
                    const auto out = run_frame(dec, codec, sigma,
                                               frame_seed(seed, p, done + i), bits, llrs);
                    if (out.error) errors.fetch_add(1);
                    iter_sum.fetch_add(static_cast<std::uint64_t>(out.iterations));
                }
            };
            if (jobs <= 1) {
                worker();
            } else {
                std::vector<std::thread> pool;
                for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
                for (auto& th : pool) th.join();
            }
            done += batch;
            if (errors.load() >= stop.min_frame_errors) break;  // decided at chunk boundaries only
        }

        SnrPointResult pt;
        pt.snr_db = chan.snr_db_points[p];
        pt.frames = done;
        pt.frame_errors = errors.load();
        pt.fer = done ? static_cast<double>(pt.frame_errors) / static_cast<double>(done) : 0.0;
        pt.ci95_halfwidth =
            done ? 1.96 * std::sqrt(pt.fer * (1.0 - pt.fer) / static_cast<double>(done)) : 0.0;
        pt.mean_iterations =
            done ? static_cast<double>(iter_sum.load()) / static_cast<double>(done) : 0.0;
        pt.reached_error_target = pt.frame_errors >= stop.min_frame_errors;
        result.points.push_back(pt);
    }
    return result;
}

}  // namespace qpp
