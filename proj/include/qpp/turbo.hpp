#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "qpp/polynomial.hpp"

namespace qpp {

// Binary rate-1/2 systematic recursive convolutional constituent code.
// Polynomials are bitmasks with bit i = coefficient of D^i, constant term
// included. The defaults are the 8-state code used by the 3GPP turbo code:
// feedback 1 + D^2 + D^3, feedforward 1 + D + D^3.
struct RscSpec {
    int memory = 3;
    unsigned feedback = 0b1101;
    unsigned feedforward = 0b1011;

    static RscSpec lte() { return {}; }
    int num_states() const { return 1 << memory; }

    bool operator==(const RscSpec&) const = default;
};

// Precomputed per-state transition tables. State convention: bit k of the
// state is the register holding the input delayed k+1 steps, so bit 0 is the
// newest. All tables are indexed by the *information* bit u; the recursive
// feedback a = u xor fb(state) is applied internally.
class RscTrellis {
public:
    explicit RscTrellis(const RscSpec& spec);

    const RscSpec& spec() const { return spec_; }
    int num_states() const { return nstates_; }

    int next_state(int s, int u) const { return next_[s][u]; }
    int parity(int s, int u) const { return parity_[s][u]; }
    // Information bit that drives the register input a to zero; feeding
    // memory of these returns the encoder to state 0.
    int tail_input(int s) const { return tail_in_[s]; }

private:
    RscSpec spec_;
    int nstates_;
    std::array<std::array<std::uint8_t, 2>, 64> next_{};
    std::array<std::array<std::uint8_t, 2>, 64> parity_{};
    std::array<std::uint8_t, 64> tail_in_{};
};

struct RscTailStep {
    std::uint8_t systematic;  // transmitted tail input bit
    std::uint8_t parity;
};

struct RscEncoding {
    std::vector<std::uint8_t> parity;           // one bit per information bit
    std::vector<RscTailStep> tail;              // memory steps, empty if not terminated
    int final_state = 0;                        // 0 whenever terminated
};

// Encodes bits starting from state 0. With terminate, appends the unique
// memory-step tail that returns the encoder to state 0; the tail systematic
// bits are part of the output (they are not information).
RscEncoding rsc_encode(std::span<const std::uint8_t> bits, const RscTrellis& trellis,
                       bool terminate = true);

// Parallel concatenation of two identical RSC encoders, the second fed
// through the interleaver. Both constituents are terminated independently.
struct TurboCodecConfig {
    RscSpec rsc = RscSpec::lte();
    Permutation interleaver;
    int max_iterations = 12;
    double llr_stop_threshold = 10.0;

    explicit TurboCodecConfig(Permutation pi) : interleaver(std::move(pi)) {}
};

struct TurboCodeword {
    std::vector<std::uint8_t> systematic;       // length L
    std::vector<std::uint8_t> parity1;          // length L
    std::vector<std::uint8_t> parity2;          // length L
    std::vector<std::uint8_t> termination;      // 4*memory bits, see transmit_order

    std::size_t size() const { return 3 * systematic.size() + termination.size(); }
    std::uint32_t weight() const;
    // systematic | parity1 | parity2 | tail1 (sys,par pairs) | tail2 (sys,par pairs)
    std::vector<std::uint8_t> transmit_order() const;
};

TurboCodeword turbo_encode(std::span<const std::uint8_t> bits, const TurboCodecConfig& cfg);

// Exact a-posteriori information-bit LLRs for one terminated constituent code,
// computed in the log domain with the exact max* = max + log1p(exp(-|diff|))
// recursion (forward/backward). Inputs are channel LLRs log P(bit=1)/P(bit=0):
// systematic and parity each carry L + memory values (information steps then
// tail steps); apriori carries L values. Tail steps contribute to the state
// recursions but produce no output.
std::vector<double> rsc_map_posterior(const RscTrellis& trellis,
                                      std::span<const double> systematic,
                                      std::span<const double> parity,
                                      std::span<const double> apriori);

struct TurboDecodeResult {
    std::vector<std::uint8_t> bits;
    int iterations = 0;      // full iterations actually executed
    bool converged = false;  // stopped early because min |posterior LLR| reached threshold
};

// Iterative decoder with two MAP passes per iteration and extrinsic exchange
// through the interleaver. Stops after max_iterations, or earlier once every
// posterior LLR has magnitude >= llr_stop_threshold. Holds reusable scratch
// buffers; one instance per thread.
class TurboDecoder {
public:
    explicit TurboDecoder(const TurboCodecConfig& cfg);

    // channel_llrs in transmit_order() layout, size 3L + 4*memory.
    TurboDecodeResult decode(std::span<const double> channel_llrs);

    const TurboCodecConfig& config() const { return cfg_; }

private:
    TurboCodecConfig cfg_;
    RscTrellis trellis_;
    std::vector<std::uint32_t> inverse_;
    // scratch, sized in the constructor
    std::vector<double> sys1_, par1_, sys2_, par2_, apriori1_, apriori2_, post_;
    std::vector<double> alpha_, beta_;

    void map_pass(std::span<const double> sys, std::span<const double> par,
                  std::span<const double> apriori, std::span<double> out);
};

TurboDecodeResult turbo_decode(std::span<const double> channel_llrs,
                               const TurboCodecConfig& cfg);

}  // namespace qpp
