#include "qpp/turbo.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace qpp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Exact log(exp(a) + exp(b)). The correction term is below double resolution
// once the gap exceeds ~40, so it is skipped there.
inline double maxstar(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = a > b ? a : b;
    const double gap = a > b ? a - b : b - a;
    return gap > 40.0 ? hi : hi + std::log1p(std::exp(-gap));
}

inline int parity_bits(unsigned v) { return std::popcount(v) & 1; }

}  // namespace

RscTrellis::RscTrellis(const RscSpec& spec) : spec_(spec), nstates_(spec.num_states()) {
    if (spec.memory < 1 || spec.memory > 6)
        throw std::invalid_argument("constituent memory out of range");
    if (!(spec.feedback & 1u) || !(spec.feedforward & 1u))
        throw std::invalid_argument("generator polynomials need a constant term");
    const unsigned fb_taps = spec.feedback >> 1;    // taps on the state registers
    const unsigned ff_taps = spec.feedforward >> 1;
    for (int s = 0; s < nstates_; ++s) {
        const int fb = parity_bits(static_cast<unsigned>(s) & fb_taps);
        tail_in_[s] = static_cast<std::uint8_t>(fb);
        for (int u = 0; u < 2; ++u) {
            const int a = u ^ fb;  // register input after feedback
            next_[s][u] = static_cast<std::uint8_t>(((s << 1) | a) & (nstates_ - 1));
            parity_[s][u] =
                static_cast<std::uint8_t>(a ^ parity_bits(static_cast<unsigned>(s) & ff_taps));
        }
    }
}

RscEncoding rsc_encode(std::span<const std::uint8_t> bits, const RscTrellis& trellis,
                       bool terminate) {
    RscEncoding out;
    out.parity.resize(bits.size());
    int s = 0;
    for (std::size_t k = 0; k < bits.size(); ++k) {
        const int u = bits[k] & 1;
        out.parity[k] = static_cast<std::uint8_t>(trellis.parity(s, u));
        s = trellis.next_state(s, u);
    }
    if (terminate) {
        out.tail.resize(trellis.spec().memory);
        for (auto& step : out.tail) {
            const int u = trellis.tail_input(s);
            step = {static_cast<std::uint8_t>(u), static_cast<std::uint8_t>(trellis.parity(s, u))};
            s = trellis.next_state(s, u);
        }
    }
    out.final_state = s;
    return out;
}

std::uint32_t TurboCodeword::weight() const {
    auto sum = [](const std::vector<std::uint8_t>& v) {
        return std::accumulate(v.begin(), v.end(), std::uint32_t{0});
    };
    return sum(systematic) + sum(parity1) + sum(parity2) + sum(termination);
}

std::vector<std::uint8_t> TurboCodeword::transmit_order() const {
    std::vector<std::uint8_t> out;
    out.reserve(size());
    out.insert(out.end(), systematic.begin(), systematic.end());
    out.insert(out.end(), parity1.begin(), parity1.end());
    out.insert(out.end(), parity2.begin(), parity2.end());
    out.insert(out.end(), termination.begin(), termination.end());
    return out;
}

TurboCodeword turbo_encode(std::span<const std::uint8_t> bits, const TurboCodecConfig& cfg) {
    const std::uint32_t L = cfg.interleaver.size();
    if (bits.size() != L)
        throw std::invalid_argument("frame length does not match the interleaver");
    RscTrellis trellis(cfg.rsc);

    std::vector<std::uint8_t> permuted(L);
    for (std::uint32_t i = 0; i < L; ++i) permuted[i] = bits[cfg.interleaver(i)];

    auto enc1 = rsc_encode(bits, trellis, true);
    auto enc2 = rsc_encode(permuted, trellis, true);

    TurboCodeword cw;
    cw.systematic.assign(bits.begin(), bits.end());
    cw.parity1 = std::move(enc1.parity);
    cw.parity2 = std::move(enc2.parity);
    cw.termination.reserve(4 * cfg.rsc.memory);
    for (const auto& t : enc1.tail) {
        cw.termination.push_back(t.systematic);
        cw.termination.push_back(t.parity);
    }
    for (const auto& t : enc2.tail) {
        cw.termination.push_back(t.systematic);
        cw.termination.push_back(t.parity);
    }
    return cw;
}

namespace {

// Shared forward/backward engine. sys and par carry L + memory entries, the
// tail steps having a single forced branch per state. Outputs posterior LLRs
// for the L information steps. alpha is caller scratch of (K+1)*S doubles.
void log_map(const RscTrellis& tr, std::span<const double> sys, std::span<const double> par,
             std::span<const double> apriori, std::span<double> out, std::vector<double>& alpha) {
    const int S = tr.num_states();
    const int m = tr.spec().memory;
    const std::size_t L = apriori.size();
    const std::size_t K = L + static_cast<std::size_t>(m);
    if (sys.size() != K || par.size() != K)
        throw std::invalid_argument("channel spans must cover information and tail steps");

    alpha.assign((K + 1) * S, kNegInf);
    alpha[0] = 0.0;  // state 0 at time 0

    // forward
    for (std::size_t k = 0; k < K; ++k) {
        const double* a = &alpha[k * S];
        double* an = &alpha[(k + 1) * S];
        if (k < L) {
            const double hs = 0.5 * (sys[k] + apriori[k]);
            const double hp = 0.5 * par[k];
            for (int s = 0; s < S; ++s) {
                if (a[s] == kNegInf) continue;
                for (int u = 0; u < 2; ++u) {
                    const double g = (u ? hs : -hs) + (tr.parity(s, u) ? hp : -hp);
                    double& slot = an[tr.next_state(s, u)];
                    slot = maxstar(slot, a[s] + g);
                }
            }
        } else {
            const double hs = 0.5 * sys[k];
            const double hp = 0.5 * par[k];
            for (int s = 0; s < S; ++s) {
                if (a[s] == kNegInf) continue;
                const int u = tr.tail_input(s);
                const double g = (u ? hs : -hs) + (tr.parity(s, u) ? hp : -hp);
                double& slot = an[tr.next_state(s, u)];
                slot = maxstar(slot, a[s] + g);
            }
        }
        double mx = kNegInf;
        for (int s = 0; s < S; ++s) mx = an[s] > mx ? an[s] : mx;
        for (int s = 0; s < S; ++s) an[s] -= mx;
    }

    // backward, emitting LLRs on the fly
    std::array<double, 64> beta, beta_prev;
    for (int s = 0; s < S; ++s) beta[s] = s == 0 ? 0.0 : kNegInf;  // terminated
    for (std::size_t k = K; k-- > 0;) {
        const double* a = &alpha[k * S];
        if (k < L) {
            const double hs = 0.5 * (sys[k] + apriori[k]);
            const double hp = 0.5 * par[k];
            double num = kNegInf, den = kNegInf;
            for (int s = 0; s < S; ++s) {
                beta_prev[s] = kNegInf;
                for (int u = 0; u < 2; ++u) {
                    const double g = (u ? hs : -hs) + (tr.parity(s, u) ? hp : -hp);
                    const double through = g + beta[tr.next_state(s, u)];
                    beta_prev[s] = maxstar(beta_prev[s], through);
                    if (a[s] == kNegInf) continue;
                    if (u)
                        num = maxstar(num, a[s] + through);
                    else
                        den = maxstar(den, a[s] + through);
                }
            }
            out[k] = num - den;
        } else {
            const double hs = 0.5 * sys[k];
            const double hp = 0.5 * par[k];
            for (int s = 0; s < S; ++s) {
                const int u = tr.tail_input(s);
                const double g = (u ? hs : -hs) + (tr.parity(s, u) ? hp : -hp);
                beta_prev[s] = g + beta[tr.next_state(s, u)];
            }
        }
        double mx = kNegInf;
        for (int s = 0; s < S; ++s) mx = beta_prev[s] > mx ? beta_prev[s] : mx;
        for (int s = 0; s < S; ++s) beta[s] = beta_prev[s] - mx;
    }
}

}  // namespace

std::vector<double> rsc_map_posterior(const RscTrellis& trellis,
                                      std::span<const double> systematic,
                                      std::span<const double> parity,
                                      std::span<const double> apriori) {
    std::vector<double> out(apriori.size());
    std::vector<double> scratch;
    log_map(trellis, systematic, parity, apriori, out, scratch);
    return out;
}

TurboDecoder::TurboDecoder(const TurboCodecConfig& cfg) : cfg_(cfg), trellis_(cfg.rsc) {
    const std::size_t L = cfg_.interleaver.size();
    const std::size_t m = static_cast<std::size_t>(cfg_.rsc.memory);
    inverse_ = cfg_.interleaver.inverse();
    sys1_.resize(L + m);
    par1_.resize(L + m);
    sys2_.resize(L + m);
    par2_.resize(L + m);
    apriori1_.assign(L, 0.0);
    apriori2_.assign(L, 0.0);
    post_.resize(L);
    beta_.resize(L);  // reused as the per-pass posterior buffer
}

void TurboDecoder::map_pass(std::span<const double> sys, std::span<const double> par,
                            std::span<const double> apriori, std::span<double> out) {
    log_map(trellis_, sys, par, apriori, out, alpha_);
}

TurboDecodeResult TurboDecoder::decode(std::span<const double> channel_llrs) {
    const std::size_t L = cfg_.interleaver.size();
    const std::size_t m = static_cast<std::size_t>(cfg_.rsc.memory);
    if (channel_llrs.size() != 3 * L + 4 * m)
        throw std::invalid_argument("channel LLR frame has the wrong size");

    const double* ch = channel_llrs.data();
    for (std::size_t k = 0; k < L; ++k) {
        sys1_[k] = ch[k];
        par1_[k] = ch[L + k];
        sys2_[k] = ch[cfg_.interleaver(static_cast<std::uint32_t>(k))];
        par2_[k] = ch[2 * L + k];
    }
    const double* tail = ch + 3 * L;
    for (std::size_t j = 0; j < m; ++j) {
        sys1_[L + j] = tail[2 * j];
        par1_[L + j] = tail[2 * j + 1];
        sys2_[L + j] = tail[2 * m + 2 * j];
        par2_[L + j] = tail[2 * m + 2 * j + 1];
    }

    std::fill(apriori1_.begin(), apriori1_.end(), 0.0);
    std::span<double> pass_out(beta_.data(), L);

    TurboDecodeResult res;
    for (int it = 1; it <= cfg_.max_iterations; ++it) {
        map_pass(sys1_, par1_, apriori1_, pass_out);
        for (std::size_t k = 0; k < L; ++k)  // extrinsic of pass 1, permuted into pass-2 order
            apriori2_[k] = pass_out[cfg_.interleaver(static_cast<std::uint32_t>(k))] -
                           sys1_[cfg_.interleaver(static_cast<std::uint32_t>(k))] -
                           apriori1_[cfg_.interleaver(static_cast<std::uint32_t>(k))];
        map_pass(sys2_, par2_, apriori2_, pass_out);
        double min_abs = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < L; ++k) {
            const double e2 = pass_out[k] - sys2_[k] - apriori2_[k];
            const std::uint32_t nat = cfg_.interleaver(static_cast<std::uint32_t>(k));
            apriori1_[nat] = e2;
            post_[nat] = pass_out[k];
            const double mag = std::fabs(pass_out[k]);
            min_abs = mag < min_abs ? mag : min_abs;
        }
        res.iterations = it;
        if (min_abs >= cfg_.llr_stop_threshold) {
            res.converged = true;
            break;
        }
    }

    res.bits.resize(L);
    for (std::size_t k = 0; k < L; ++k) res.bits[k] = post_[k] > 0.0 ? 1 : 0;
    return res;
}

TurboDecodeResult turbo_decode(std::span<const double> channel_llrs,
                               const TurboCodecConfig& cfg) {
    return TurboDecoder(cfg).decode(channel_llrs);
}

}  // namespace qpp
