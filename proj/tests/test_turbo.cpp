#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "qpp/turbo.hpp"

using namespace qpp;

namespace {

const RscTrellis& lte_trellis() {
    static RscTrellis t(RscSpec::lte());
    return t;
}

TurboCodecConfig codec_for(std::uint32_t q1, std::uint32_t q2, std::uint32_t L) {
    return TurboCodecConfig{permutation_of({q1, q2, L})};
}

std::vector<std::uint8_t> random_bits(std::mt19937_64& rng, std::size_t n) {
    std::vector<std::uint8_t> v(n);
    for (auto& b : v) b = static_cast<std::uint8_t>(rng() & 1);
    return v;
}

// Reference posterior by summing over every input pattern explicitly.
std::vector<double> enumeration_posterior(const RscTrellis& tr, const std::vector<double>& sys,
                                          const std::vector<double>& par,
                                          const std::vector<double>& apriori) {
    const std::size_t L = apriori.size();
    auto logsum = [](double a, double b) {
        if (a == -INFINITY) return b;
        if (b == -INFINITY) return a;
        const double hi = a > b ? a : b;
        return hi + std::log1p(std::exp(-std::fabs(a - b)));
    };
    std::vector<double> num(L, -INFINITY), den(L, -INFINITY);
    std::vector<std::uint8_t> bits(L);
    for (std::uint64_t pattern = 0; pattern < (1ull << L); ++pattern) {
        for (std::size_t k = 0; k < L; ++k) bits[k] = (pattern >> k) & 1;
        const auto enc = rsc_encode(bits, tr, true);
        double score = 0;
        for (std::size_t k = 0; k < L; ++k) {
            score += 0.5 * (bits[k] ? 1 : -1) * (sys[k] + apriori[k]);
            score += 0.5 * (enc.parity[k] ? 1 : -1) * par[k];
        }
        for (std::size_t j = 0; j < enc.tail.size(); ++j) {
            score += 0.5 * (enc.tail[j].systematic ? 1 : -1) * sys[L + j];
            score += 0.5 * (enc.tail[j].parity ? 1 : -1) * par[L + j];
        }
        for (std::size_t k = 0; k < L; ++k)
            if (bits[k])
                num[k] = logsum(num[k], score);
            else
                den[k] = logsum(den[k], score);
    }
    std::vector<double> out(L);
    for (std::size_t k = 0; k < L; ++k) out[k] = num[k] - den[k];
    return out;
}

}  // namespace

TEST_CASE("trellis tables for the 8-state constituent code") {
    const auto& tr = lte_trellis();
    CHECK(tr.num_states() == 8);
    // state 0: recursion quiet, input passes through
    CHECK(tr.next_state(0, 0) == 0);
    CHECK(tr.parity(0, 0) == 0);
    CHECK(tr.next_state(0, 1) == 1);
    CHECK(tr.parity(0, 1) == 1);
    CHECK(tr.tail_input(0) == 0);
    // state 6 (registers 0,1,1): feedback taps cancel
    CHECK(tr.tail_input(6) == 0);
    CHECK(tr.next_state(6, 0) == 4);
    CHECK(tr.parity(6, 0) == 1);
    // state 2 (registers 0,1,0): feedback 1
    CHECK(tr.tail_input(2) == 1);
    CHECK(tr.next_state(2, 0) == 5);  // u=0 -> register input 1
    CHECK(tr.next_state(2, 1) == 4);
}

TEST_CASE("hand-traced encoding of an impulse") {
    // single one at position 0 of an 8-bit frame, worked out by hand
    std::vector<std::uint8_t> bits{1, 0, 0, 0, 0, 0, 0, 0};
    const auto enc = rsc_encode(bits, lte_trellis(), true);
    CHECK(enc.parity == std::vector<std::uint8_t>{1, 1, 1, 1, 0, 0, 1, 0});
    REQUIRE(enc.tail.size() == 3);
    CHECK(enc.tail[0].systematic == 0);
    CHECK(enc.tail[0].parity == 1);
    CHECK(enc.tail[1].systematic == 1);
    CHECK(enc.tail[1].parity == 0);
    CHECK(enc.tail[2].systematic == 1);
    CHECK(enc.tail[2].parity == 1);
    CHECK(enc.final_state == 0);
}

TEST_CASE("termination always returns to state 0") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 10000; ++t) {
        const auto bits = random_bits(rng, 40);
        CHECK(rsc_encode(bits, lte_trellis(), true).final_state == 0);
    }
}

TEST_CASE("unterminated encoding keeps the running state") {
    std::vector<std::uint8_t> bits{1, 0, 0, 0, 0, 0, 0, 0};
    const auto enc = rsc_encode(bits, lte_trellis(), false);
    CHECK(enc.tail.empty());
    CHECK(enc.final_state == 1);
}

TEST_CASE("turbo codeword layout and weight") {
    auto cfg = codec_for(1, 2, 8);
    std::vector<std::uint8_t> bits{1, 0, 0, 0, 0, 0, 0, 0};
    const auto cw = turbo_encode(bits, cfg);
    CHECK(cw.systematic == bits);
    CHECK(cw.parity1.size() == 8);
    CHECK(cw.parity2.size() == 8);
    CHECK(cw.termination.size() == 12);
    CHECK(cw.size() == 36);
    const auto flat = cw.transmit_order();
    REQUIRE(flat.size() == 36);
    std::uint32_t s = 0;
    for (auto b : flat) s += b;
    CHECK(s == cw.weight());
    // second encoder sees the interleaved frame: one at position inv(0)
    const auto enc1 = rsc_encode(bits, lte_trellis(), true);
    CHECK(cw.parity1 == enc1.parity);
}

TEST_CASE("interleaving direction: second encoder reads u[pi(i)]") {
    auto cfg = codec_for(1, 2, 8);  // map 0,3,2,5,4,7,6,1
    std::vector<std::uint8_t> bits{0, 1, 0, 0, 0, 0, 0, 0};
    std::vector<std::uint8_t> expect_permuted(8, 0);
    for (std::uint32_t i = 0; i < 8; ++i) expect_permuted[i] = bits[cfg.interleaver(i)];
    CHECK(expect_permuted[7] == 1);  // pi(7) = 1
    const auto cw = turbo_encode(bits, cfg);
    CHECK(cw.parity2 == rsc_encode(expect_permuted, lte_trellis(), true).parity);
}

TEST_CASE("log-MAP posterior matches exhaustive enumeration") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> chan(-3.0, 3.0), ap(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t L = 10;
        std::vector<double> sys(L + 3), par(L + 3), apriori(L);
        for (auto& v : sys) v = chan(rng);
        for (auto& v : par) v = chan(rng);
        for (auto& v : apriori) v = ap(rng);
        const auto fast = rsc_map_posterior(lte_trellis(), sys, par, apriori);
        const auto slow = enumeration_posterior(lte_trellis(), sys, par, apriori);
        REQUIRE(fast.size() == slow.size());
        for (std::size_t k = 0; k < L; ++k)
            CHECK(std::fabs(fast[k] - slow[k]) <= 1e-6);
    }
}

TEST_CASE("noiseless decoding recovers the frame and stops early") {
    auto cfg = codec_for(13, 30, 40);
    std::mt19937_64 rng(3);
    TurboDecoder dec(cfg);
    for (int t = 0; t < 200; ++t) {
        const auto bits = random_bits(rng, 40);
        const auto flat = turbo_encode(bits, cfg).transmit_order();
        std::vector<double> llrs(flat.size());
        for (std::size_t i = 0; i < flat.size(); ++i) llrs[i] = flat[i] ? 9.0 : -9.0;
        const auto res = dec.decode(llrs);
        CHECK(res.bits == bits);
        CHECK(res.converged);
        CHECK(res.iterations < 12);
    }
}

TEST_CASE("iteration cap respected") {
    auto cfg = codec_for(13, 30, 40);
    cfg.max_iterations = 1;
    std::vector<std::uint8_t> bits(40, 0);
    const auto flat = turbo_encode(bits, cfg).transmit_order();
    std::vector<double> llrs(flat.size());
    for (std::size_t i = 0; i < flat.size(); ++i) llrs[i] = flat[i] ? 0.1 : -0.1;
    const auto res = TurboDecoder(cfg).decode(llrs);
    CHECK(res.iterations == 1);
}

TEST_CASE("decoder validates frame size") {
    auto cfg = codec_for(1, 2, 8);
    std::vector<double> wrong(10, 0.0);
    CHECK_THROWS(TurboDecoder(cfg).decode(wrong));
}
