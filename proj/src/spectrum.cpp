#include "qpp/spectrum.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <climits>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>

#include "qpp/errors.hpp"

namespace qpp {

namespace {

constexpr int kMaxWeight = 16;   // hard cap on input_weight_cap
constexpr int kMaxStates = 16;
constexpr int kInfW = 1 << 20;   // "unreachable" weight; safe to add a few times
constexpr int kGapExact = 40;    // gap lengths with exact min-weight tables

// Zero-input state dynamics of the recursive encoder. The state-update map
// under a zero register input is invertible (the feedback polynomial has a
// unit constant term), so every state sits on a pure cycle; long runs of
// zero information bits are folded to O(1) with these tables.
struct ZeroRun {
    int period[kMaxStates];
    int state_at[kMaxStates][kMaxStates + 1];  // state after n zero steps, n <= period
    int weight_at[kMaxStates][kMaxStates + 1]; // parity weight emitted over those steps
    int cycle_weight[kMaxStates];

    void advance(int s, std::uint32_t n, int& state_out, int& weight_out) const {
        const std::uint32_t p = static_cast<std::uint32_t>(period[s]);
        const std::uint32_t r = n % p;
        state_out = state_at[s][r];
        weight_out = static_cast<int>(n / p) * cycle_weight[s] + weight_at[s][r];
    }
};

struct Tables {
    int nstates;
    int one_next[kMaxStates];     // transition on information bit 1
    int one_parity[kMaxStates];
    int tail_weight[kMaxStates];  // systematic+parity weight of the termination run
    ZeroRun zr;
    // min future (parity + termination) weight from a state with exactly r
    // more ones to place, gaps unrestricted
    int completion[kMaxStates][kMaxWeight + 1];
    int completion_min[kMaxWeight + 1];  // min over states
    int compl_cls[2][kMaxWeight + 1];    // min over states of each class

    // Everything below bounds the cost of crossing a run of exactly g steps
    // carrying exactly j ones, used to price the gaps between the already
    // fixed positions on the interleaved side.
    int reach0[kMaxStates][kMaxWeight + 1];  // min parity cost state -> 0, exactly j ones
    int leave0[kMaxStates][kMaxWeight + 1];  // min parity cost 0 -> state, exactly j ones
    int touch0[kMaxStates][kMaxStates][kMaxWeight + 1];  // via state 0, length relaxed
    int cyc_period = 1, cyc_weight = 0;  // zero-run structure away from state 0
    int gx[kGapExact + 1][kMaxWeight + 1][kMaxStates][kMaxStates];  // exact, short runs
    // state-class (0 = the all-zero state, 1 = everything else) folds of the
    // above, min'd over up to j ones; cheap floors for scan-time vetoes
    int cls_exact[kGapExact + 1][kMaxWeight + 1][2][2];
    int reach0_cyc[kMaxWeight + 1];
    int leave0_cyc[kMaxWeight + 1];
    int touch0_cyc[kMaxWeight + 1];
    int one_cls[2][2];  // min parity of a one-step between the classes
    int one_cls_any[2];

    explicit Tables(const RscTrellis& tr) {
        nstates = tr.num_states();
        if (nstates > kMaxStates) throw std::invalid_argument("too many trellis states");
        for (int s = 0; s < nstates; ++s) {
            one_next[s] = tr.next_state(s, 1);
            one_parity[s] = tr.parity(s, 1);
            int st = s, w = 0;
            for (int k = 0; k < tr.spec().memory; ++k) {
                const int u = tr.tail_input(st);
                w += u + tr.parity(st, u);
                st = tr.next_state(st, u);
            }
            tail_weight[s] = w;
        }
        for (int s = 0; s < nstates; ++s) {
            int st = s, w = 0, n = 0;
            zr.state_at[s][0] = s;
            zr.weight_at[s][0] = 0;
            do {
                w += tr.parity(st, 0);
                st = tr.next_state(st, 0);
                ++n;
                zr.state_at[s][n] = st;
                zr.weight_at[s][n] = w;
            } while (st != s && n <= kMaxStates);
            if (st != s)
                throw std::logic_error("zero-input state orbit failed to close");
            zr.period[s] = n;
            zr.cycle_weight[s] = w;
        }
        for (int s = 0; s < nstates; ++s)
            completion[s][0] = min_over_cycle(s, [&](int st) { return tail_weight[st]; });
        for (int r = 1; r <= kMaxWeight; ++r)
            for (int s = 0; s < nstates; ++s)
                completion[s][r] = min_over_cycle(
                    s, [&](int st) { return one_parity[st] + completion[one_next[st]][r - 1]; });
        for (int r = 0; r <= kMaxWeight; ++r) {
            int m = INT_MAX;
            for (int s = 0; s < nstates; ++s) m = std::min(m, completion[s][r]);
            completion_min[r] = m;
            compl_cls[0][r] = completion[0][r];
            int mc = INT_MAX;
            for (int s = 1; s < nstates; ++s) mc = std::min(mc, completion[s][r]);
            compl_cls[1][r] = mc;
        }

        cyc_weight = INT_MAX;
        for (int s = 1; s < nstates; ++s) {
            cyc_period = std::max(cyc_period, zr.period[s]);
            cyc_weight = std::min(cyc_weight, zr.cycle_weight[s]);
        }
        if (cyc_weight == INT_MAX) cyc_weight = 0;

        // exact min parity weight of length-g runs with exactly j ones
        for (int j = 0; j <= kMaxWeight; ++j)
            for (int s = 0; s < nstates; ++s)
                for (int s2 = 0; s2 < nstates; ++s2)
                    gx[0][j][s][s2] = (j == 0 && s == s2) ? 0 : kInfW;
        for (int g = 1; g <= kGapExact; ++g)
            for (int j = 0; j <= kMaxWeight; ++j)
                for (int s = 0; s < nstates; ++s) {
                    const int zs = zr.state_at[s][1], zw = zr.weight_at[s][1];
                    for (int s2 = 0; s2 < nstates; ++s2) {
                        int best = zw + gx[g - 1][j][zs][s2];
                        if (j > 0)
                            best = std::min(best,
                                            one_parity[s] + gx[g - 1][j - 1][one_next[s]][s2]);
                        gx[g][j][s][s2] = std::min(best, kInfW);
                    }
                }

        // cheapest detours through the all-zero state, run lengths relaxed;
        // the zero-step graph is a permutation, so a few sweeps converge
        for (int j = 0; j <= kMaxWeight; ++j) {
            for (int s = 0; s < nstates; ++s)
                reach0[s][j] = j == 0 ? (s == 0 ? 0 : kInfW)
                                      : std::min(kInfW, one_parity[s] + reach0[one_next[s]][j - 1]);
            for (int pass = 0; pass < 2 * kMaxStates; ++pass)
                for (int s = 0; s < nstates; ++s)
                    reach0[s][j] = std::min(
                        reach0[s][j], zr.weight_at[s][1] + reach0[zr.state_at[s][1]][j]);
        }
        for (int j = 0; j <= kMaxWeight; ++j) {
            for (int s = 0; s < nstates; ++s) leave0[s][j] = kInfW;
            if (j == 0)
                leave0[0][0] = 0;
            else
                for (int s = 0; s < nstates; ++s)
                    leave0[one_next[s]][j] =
                        std::min(leave0[one_next[s]][j], leave0[s][j - 1] + one_parity[s]);
            for (int pass = 0; pass < 2 * kMaxStates; ++pass)
                for (int s = 0; s < nstates; ++s)
                    leave0[zr.state_at[s][1]][j] = std::min(
                        leave0[zr.state_at[s][1]][j], leave0[s][j] + zr.weight_at[s][1]);
        }
        for (int s = 0; s < nstates; ++s)
            for (int s2 = 0; s2 < nstates; ++s2)
                for (int j = 0; j <= kMaxWeight; ++j) {
                    int best = kInfW;
                    for (int j1 = 0; j1 <= j; ++j1)
                        best = std::min(best, reach0[s][j1] + leave0[s2][j - j1]);
                    touch0[s][s2][j] = std::min(best, kInfW);
                }

        for (int g = 0; g <= kGapExact; ++g)
            for (int j = 0; j <= kMaxWeight; ++j)
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) {
                        int best = j > 0 ? cls_exact[g][j - 1][a][b] : kInfW;
                        for (int s = 0; s < nstates; ++s) {
                            if ((s != 0) != (a == 1)) continue;
                            for (int s2 = 0; s2 < nstates; ++s2) {
                                if ((s2 != 0) != (b == 1)) continue;
                                best = std::min(best, gx[g][j][s][s2]);
                            }
                        }
                        cls_exact[g][j][a][b] = best;
                    }
        for (int j = 0; j <= kMaxWeight; ++j) {
            int r = j > 0 ? reach0_cyc[j - 1] : kInfW;
            int l = j > 0 ? leave0_cyc[j - 1] : kInfW;
            int t = j > 0 ? touch0_cyc[j - 1] : kInfW;
            for (int s = 1; s < nstates; ++s) {
                r = std::min(r, reach0[s][j]);
                l = std::min(l, leave0[s][j]);
                for (int s2 = 1; s2 < nstates; ++s2) t = std::min(t, touch0[s][s2][j]);
            }
            reach0_cyc[j] = r;
            leave0_cyc[j] = l;
            touch0_cyc[j] = t;
        }
        for (int a = 0; a < 2; ++a) one_cls[a][0] = one_cls[a][1] = kInfW;
        for (int s = 0; s < nstates; ++s) {
            const int a = s != 0, b = one_next[s] != 0;
            one_cls[a][b] = std::min(one_cls[a][b], one_parity[s]);
        }
        for (int a = 0; a < 2; ++a)
            one_cls_any[a] = std::min(one_cls[a][0], one_cls[a][1]);
    }

    // Floor for crossing exactly g steps with at most jcap ones between state
    // classes a -> b (0 = the all-zero state, 1 = any cycle state).
    int cross_min(int a, std::uint32_t g, int jcap, int b) const {
        if (g <= static_cast<std::uint32_t>(kGapExact)) return cls_exact[g][jcap][a][b];
        if (a == 0) return b == 0 ? 0 : leave0_cyc[jcap];
        if (b == 0) return reach0_cyc[jcap];
        int best = touch0_cyc[jcap];
        if (cyc_weight > 0) {
            const long z = static_cast<long>(g) - jcap;
            const long slack = z - static_cast<long>(cyc_period - 1) * (jcap + 1);
            const int fl =
                slack > 0
                    ? static_cast<int>((slack + cyc_period - 1) / cyc_period) * cyc_weight
                    : 0;
            best = std::min(best, fl);
        } else {
            best = 0;
        }
        return best;
    }

    // Admissible lower bound on the parity weight of a run of exactly g steps
    // with exactly j >= 1 ones, entering at state s and leaving at s2. Short
    // runs are exact; long ones take the cheaper of a detour through the
    // all-zero state (length relaxed) and staying on the zero-step cycle,
    // where every full cycle period among the zero steps pays the cycle
    // weight.
    int gap_cost(int s, std::uint32_t g, int j, int s2) const {
        if (static_cast<std::uint32_t>(j) > g) return kInfW;
        if (g <= static_cast<std::uint32_t>(kGapExact)) return gx[g][j][s][s2];
        int best = touch0[s][s2][j];
        if (s != 0 && s2 != 0 && cyc_weight > 0) {
            const long z = static_cast<long>(g) - j;
            const long slack = z - static_cast<long>(cyc_period - 1) * (j + 1);
            if (slack > 0) {
                const int fl = static_cast<int>((slack + cyc_period - 1) / cyc_period) * cyc_weight;
                best = std::min(best, fl);
            } else {
                best = 0;
            }
        }
        return best;
    }

    template <class F>
    int min_over_cycle(int s, F&& local_cost) const {
        int best = INT_MAX;
        for (int n = 0; n < zr.period[s]; ++n) {
            const int c = zr.weight_at[s][n] + local_cost(zr.state_at[s][n]);
            best = c < best ? c : best;
        }
        return best;
    }
};

using GapMat = int[kMaxWeight + 1][kMaxStates][kMaxStates];

// Combined cost of crossing a gap of exactly g steps with exactly j >= 1 ones
// and then taking the fixed one that ends it: gm[g][j][entry state][state
// after the fixed one]. A pure function of the trellis, so one build serves
// every pass and weight class of a spectrum run.
std::unique_ptr<GapMat[]> build_gap_tables(const Tables& tb, std::uint32_t L, int cap) {
    auto gm = std::make_unique<GapMat[]>(L);
    const int ns = tb.nstates;
    for (std::uint32_t g = 0; g < L; ++g)
        for (int j = 1; j <= cap; ++j)
            for (int s = 0; s < ns; ++s) {
                for (int t = 0; t < ns; ++t) gm[g][j][s][t] = kInfW;
                for (int s2 = 0; s2 < ns; ++s2) {
                    const int c = tb.gap_cost(s, g, j, s2);
                    if (c >= kInfW) continue;
                    int& d = gm[g][j][s][tb.one_next[s2]];
                    d = std::min(d, c + tb.one_parity[s2]);
                }
            }
    return gm;
}

struct Tally {
    std::vector<std::array<std::uint64_t, 2>> by_distance;  // [count, input weight sum]
    std::uint64_t nodes = 0;
    bool aborted = false;

    explicit Tally(std::uint32_t max_d) : by_distance(max_d + 1, {0, 0}) {}

    void merge(const Tally& o) {
        for (std::size_t d = 0; d < by_distance.size(); ++d) {
            by_distance[d][0] += o.by_distance[d][0];
            by_distance[d][1] += o.by_distance[d][1];
        }
        nodes += o.nodes;
        aborted = aborted || o.aborted;
    }
};

class WeightClassSearch {
public:
    WeightClassSearch(const Tables& tb, const GapMat* gm, const std::vector<std::uint32_t>& inv,
                      std::uint32_t L, int w, std::uint32_t threshold, std::uint64_t node_budget,
                      Tally& out)
        : tb_(tb), gm_(gm), inv_(inv), L_(L), w_(w), threshold_(threshold), budget_(node_budget),
          out_(out) {
        lb2_ = tb_.completion[0][w_];
    }

    // Explore all patterns whose first one lies in [first_lo, first_hi).
    void run(std::uint32_t first_lo, std::uint32_t first_hi) {
        first_hi_ = first_hi;
        if (first_lo >= first_hi || w_ > static_cast<int>(L_)) return;
        scan(0, first_lo, 0, 0, 0);
    }

private:
    const Tables& tb_;
    const GapMat* gm_;
    const std::vector<std::uint32_t>& inv_;
    const std::uint32_t L_;
    const int w_;
    const std::uint32_t threshold_;
    const std::uint64_t budget_;
    Tally& out_;
    int lb2_;
    std::uint32_t first_hi_ = 0;
    std::array<std::uint32_t, kMaxWeight> ipos_{};  // interleaved position of each placed one

    // The placed ones seen from the second trellis: their positions kept
    // sorted, plus per-depth pruning tables derived from them (see
    // chain_bound / chain_scalars).
    std::array<std::uint32_t, kMaxWeight + 1> sorted_{};
    int nsorted_ = 0;
    int sufmin_[kMaxWeight + 1][kMaxWeight + 2][kMaxWeight + 1];
    int scalar_[kMaxWeight + 1][kMaxWeight + 2];
    // prefix minima split by the class of the exit state (parked at zero vs
    // on the cycle); lets the veto price the crossing of the split gap
    int vminc_[kMaxWeight + 1][kMaxWeight + 2][kMaxWeight + 1][2];
    // per-depth chain vectors, kept so a child chain can copy the segments
    // its insertion left untouched instead of recomputing them. Backward rows
    // vb_[d][i][r][s]: cost from the entry of segment i to the end with at
    // most r free ones. Forward rows vf_[d][i][c][s]: cost of segments
    // 0..i-1 having consumed exactly c free ones (consumed-indexed so the
    // rows are depth-independent).
    int vb_[kMaxWeight + 1][kMaxWeight + 2][kMaxWeight + 1][kMaxStates];
    int vf_[kMaxWeight + 1][kMaxWeight + 2][kMaxWeight + 1][kMaxStates];

    void insert_sorted(std::uint32_t v) {
        int i = nsorted_;
        while (i > 0 && sorted_[i - 1] > v) {
            sorted_[i] = sorted_[i - 1];
            --i;
        }
        sorted_[i] = v;
        ++nsorted_;
    }

    void remove_sorted(std::uint32_t v) {
        int i = 0;
        while (sorted_[i] != v) ++i;
        --nsorted_;
        for (; i < nsorted_; ++i) sorted_[i] = sorted_[i + 1];
    }

    int find_slot(std::uint32_t v) const {
        int i = 0;
        while (i < nsorted_ && sorted_[i] < v) ++i;
        return i;
    }

    std::uint32_t gap_len(int i) const {
        return sorted_[i] - (i > 0 ? sorted_[i - 1] + 1 : 0);
    }

    using StateVec = int[kMaxWeight + 1][kMaxStates];  // [free ones left][state]

    // Relax one segment (gap of g steps, then the fixed one that ends it)
    // forward: B[c + j][state after the fixed one] from A[c][state at gap
    // entry], for every admissible count j of ones spent in the gap.
    void segment_fwd(const StateVec& A, StateVec& B, std::uint32_t g, int free) const {
        const int ns = tb_.nstates;
        const int jcap = static_cast<int>(std::min<std::int64_t>(free, g));
        const GapMat& D = gm_[g];
        for (int c = 0; c <= free; ++c)
            for (int s = 0; s < ns; ++s) B[c][s] = kInfW;
        for (int c = 0; c <= free; ++c)
            for (int s = 0; s < ns; ++s) {
                const int a = A[c][s];
                if (a >= kInfW) continue;
                int se, wz;
                tb_.zr.advance(s, g, se, wz);
                const int c0 = a + wz + tb_.one_parity[se];
                int& b0 = B[c][tb_.one_next[se]];
                if (c0 < b0) b0 = c0;
                const int jmax = std::min(jcap, free - c);
                for (int j = 1; j <= jmax; ++j) {
                    const int* row = D[j][s];
                    for (int t = 0; t < ns; ++t) {
                        if (row[t] >= kInfW) continue;
                        const int v = a + row[t];
                        int& b = B[c + j][t];
                        if (v < b) b = v;
                    }
                }
            }
    }

    // Same segment relaxed backward: B[r][gap entry state] from
    // A[r - j][state after the fixed one].
    void segment_bwd(const StateVec& A, StateVec& B, std::uint32_t g, int free) const {
        const int ns = tb_.nstates;
        const int jcap = static_cast<int>(std::min<std::int64_t>(free, g));
        const GapMat& D = gm_[g];
        for (int r = 0; r <= free; ++r)
            for (int s = 0; s < ns; ++s) {
                int best = kInfW;
                int se, wz;
                tb_.zr.advance(s, g, se, wz);
                const int down0 = A[r][tb_.one_next[se]];
                if (down0 < kInfW) best = wz + tb_.one_parity[se] + down0;
                const int jmax = std::min(r, jcap);
                for (int j = 1; j <= jmax; ++j) {
                    const int* row = D[j][s];
                    const int* ar = A[r - j];
                    for (int t = 0; t < ns; ++t) {
                        if (row[t] >= kInfW || ar[t] >= kInfW) continue;
                        const int v = row[t] + ar[t];
                        if (v < best) best = v;
                    }
                }
                B[r][s] = std::min(best, kInfW);
            }
    }

    // Lower bound on the whole second-trellis cost (parity + termination)
    // given the k placed ones at sorted_[0..k-1] and w_-k free ones anywhere.
    // A DP over (free ones left, state) walks the fixed positions backward
    // with exact gap lengths; free ones may be spent in any gap. Also stores
    // sufmin_[k][slot][r]: the best suffix cost from each insertion slot with
    // at most r free ones, used by chain_scalars. Returns early (with a value
    // above `slack`) once no state/budget pair can recover; the scalars are
    // only valid when the returned bound is within slack.
    // `slot` is the insertion slot in the parent chain that produced this
    // depth: segments past slot + 1 see the exact same suffix as the parent's
    // chain one index earlier, so their rows are copied, not recomputed.
    int chain_bound(int k, int slack, int slot) {
        const int free = w_ - k;
        const int ns = tb_.nstates;
        for (int r = 0; r <= free; ++r) {
            for (int s = 0; s < ns; ++s) vb_[k][k][r][s] = tb_.completion[s][r];
            sufmin_[k][k][r] =
                std::min(tb_.completion_min[r], r > 0 ? sufmin_[k][k][r - 1] : kInfW);
        }
        const int start = std::min(slot + 1, k - 1);
        for (int i = start + 1; i < k; ++i) {
            std::memcpy(vb_[k][i], vb_[k - 1][i - 1], sizeof(vb_[k][i]));
            std::memcpy(sufmin_[k][i], sufmin_[k - 1][i - 1], sizeof(sufmin_[k][i]));
        }
        for (int i = start; i >= 0; --i) {
            segment_bwd(vb_[k][i + 1], vb_[k][i], gap_len(i), free);
            int m = kInfW;
            for (int r = 0; r <= free; ++r) {
                int mr = r > 0 ? sufmin_[k][i][r - 1] : kInfW;
                for (int s = 0; s < ns; ++s) mr = std::min(mr, vb_[k][i][r][s]);
                sufmin_[k][i][r] = mr;
                m = std::min(m, mr);
            }
            if (m > slack) return m;  // the prefix still to come only adds cost
        }
        return vb_[k][0][free][0];
    }

    // Per-insertion-slot floor for the next placement at this depth: any
    // pattern that adds a one between sorted_[i-1] and sorted_[i] costs at
    // least prefix(best up to slot i) + suffix(best from the next fixed one
    // on), budgets matched, everything in between floored at zero. Lets the
    // scan veto a child without rebuilding the chain.
    void chain_scalars(int k, int slot) {
        const int free = w_ - k;
        const int ns = tb_.nstates;
        for (int c = 0; c <= free; ++c)
            for (int s = 0; s < ns; ++s) vf_[k][0][c][s] = c == 0 && s == 0 ? 0 : kInfW;
        // rows up to the insertion point share the parent's prefix exactly
        for (int i = 1; i <= slot && i < k; ++i)
            std::memcpy(vf_[k][i], vf_[k - 1][i], sizeof(vf_[k][i]));
        for (int i = std::min(slot, k - 1); i < k; ++i)
            segment_fwd(vf_[k][i], vf_[k][i + 1], gap_len(i), free);
        for (int i = 0; i <= k; ++i) {
            const int suf = i < k ? i + 1 : k;
            int m = kInfW;
            for (int c = 0; c <= free; ++c) {
                const int r = free - c;
                const int v0 = vf_[k][i][c][0];
                int vc = kInfW;
                for (int s = 1; s < ns; ++s) vc = std::min(vc, vf_[k][i][c][s]);
                vminc_[k][i][r][0] = v0;
                vminc_[k][i][r][1] = vc;
                const int vr = std::min(v0, vc);
                if (vr < kInfW) m = std::min(m, vr + sufmin_[k][suf][r]);
            }
            scalar_[k][i] = m;
        }
    }

    // Sharper per-placement floor than scalar_: prices the two half-gaps the
    // inserted one carves out of slot `slot`, plus the class transitions of
    // the inserted one and of the fixed one closing the slot, all at
    // state-class granularity (0 = parked at the all-zero state, 1 = on the
    // cycle). Everything is a min over relaxations, so the result never
    // exceeds the cost of any real completion through x.
    int veto_bound(int k, int slot, std::uint32_t x) {
        const int free = w_ - k;
        const std::uint32_t g1 =
            x - (slot > 0 ? sorted_[slot - 1] + 1 : 0);
        const bool right = slot < k;
        const std::uint32_t g2 = right ? sorted_[slot] - x - 1 : 0;
        const int sufidx = right ? slot + 1 : k;
        int best = kInfW;
        for (int r = 1; r <= free; ++r) {  // one budget unit feeds the new one
            const int suf = right ? sufmin_[k][sufidx][r - 1] : 0;
            for (int c = 0; c < 2; ++c) {
                const int pre = vminc_[k][slot][r][c];
                if (pre >= kInfW || pre + suf >= best) continue;
                for (int e = 0; e < 2; ++e) {
                    const int g1c = tb_.cross_min(c, g1, r - 1, e);
                    if (g1c >= kInfW || pre + g1c + suf >= best) continue;
                    for (int b = 0; b < 2; ++b) {
                        const int oc = tb_.one_cls[e][b];
                        if (oc >= kInfW) continue;
                        int rest;
                        if (right) {
                            // cross the right half-gap, then the fixed one
                            // that closes the slot; the chain suffix covers
                            // everything beyond it
                            rest = kInfW;
                            for (int bv = 0; bv < 2; ++bv) {
                                const int t = tb_.cross_min(b, g2, r - 1, bv);
                                if (t < kInfW)
                                    rest = std::min(rest,
                                                    t + tb_.one_cls_any[bv] + suf);
                            }
                        } else {
                            // no fixed one to the right: the completion floor
                            // already spans the rest of the frame
                            rest = tb_.compl_cls[b][r - 1];
                        }
                        if (rest < kInfW)
                            best = std::min(best, pre + g1c + oc + rest);
                    }
                }
            }
        }
        return best;
    }

    // Walk candidate positions for the one number idx, starting at trellis
    // time t0 in `state` with accumulated first-encoder parity weight p1.
    // `pslot` is the slot the previous one was inserted at, which tells the
    // chain builders how much of the parent chain they may copy. Zero steps
    // between candidates are taken incrementally. The chain tables for this
    // depth are built lazily at the first position that survives the cheap
    // tests: nodes whose whole walk dies on those tests never pay for them,
    // and by build time p1 has only grown, so the rebuilt slack is valid for
    // every position still ahead.
    void scan(int idx, std::uint32_t t0, int state, int p1, int pslot) {
        const int rem = w_ - idx;
        bool chains_ready = idx == 0;
        if (idx >= 1 && ++out_.nodes > budget_) {
            out_.aborted = true;
            return;
        }
        const std::uint32_t limit =
            idx == 0 ? std::min(first_hi_ - 1, L_ - static_cast<std::uint32_t>(rem))
                     : L_ - static_cast<std::uint32_t>(rem);
        const int base = w_ + lb2_;
        for (std::uint32_t q = t0; q <= limit; ++q) {
            if (++out_.nodes > budget_) {
                out_.aborted = true;
                return;
            }
            if (static_cast<std::uint32_t>(base + p1 + tb_.completion[state][rem]) > threshold_)
                return;  // no placement at q or later can stay under threshold
            const int pb = tb_.one_parity[state];
            const int s1 = tb_.one_next[state];
            if (static_cast<std::uint32_t>(base + p1 + pb + tb_.completion[s1][rem - 1]) <=
                threshold_) {
                if (!chains_ready) {
                    const int slack =
                        static_cast<int>(threshold_) - (w_ + p1 + tb_.completion_min[rem]);
                    if (slack < 0 || chain_bound(idx, slack, pslot) > slack) return;
                    if (rem >= 2) chain_scalars(idx, pslot);
                    chains_ready = true;
                }
                const std::uint32_t x = inv_[q];
                ipos_[idx] = x;
                if (rem == 1) {
                    close(q + 1, s1, p1 + pb);
                } else {
                    bool viable = true;
                    int slot = 0;
                    if (idx >= 1) {
                        slot = find_slot(x);
                        const std::uint32_t head = w_ + p1 + pb + tb_.completion[s1][rem - 1];
                        viable = head + scalar_[idx][slot] <= threshold_ &&
                                 head + veto_bound(idx, slot, x) <= threshold_;
                    }
                    if (viable) {
                        insert_sorted(x);
                        scan(idx + 1, q + 1, s1, p1 + pb, slot);
                        remove_sorted(x);
                    }
                }
                if (out_.aborted) return;
            }
            p1 += tb_.zr.weight_at[state][1];  // one zero step
            state = tb_.zr.state_at[state][1];
        }
    }

    // All ones placed; finish the first trellis exactly, then replay the
    // pattern in interleaved order through the second trellis.
    void close(std::uint32_t t, int state, int p1) {
        if (++out_.nodes > budget_) {
            out_.aborted = true;
            return;
        }
        int send, zw;
        tb_.zr.advance(state, L_ - t, send, zw);
        const std::uint32_t partial = w_ + p1 + zw + tb_.tail_weight[send];
        if (partial + lb2_ > threshold_) return;

        std::array<std::uint32_t, kMaxWeight> pos = ipos_;
        std::sort(pos.begin(), pos.begin() + w_);
        int s2 = 0, p2 = 0;
        std::uint32_t t2 = 0;
        for (int j = 0; j < w_; ++j) {
            int st, wz;
            tb_.zr.advance(s2, pos[j] - t2, st, wz);
            p2 += wz + tb_.one_parity[st];
            s2 = tb_.one_next[st];
            t2 = pos[j] + 1;
        }
        int st, wz;
        tb_.zr.advance(s2, L_ - t2, st, wz);
        p2 += wz + tb_.tail_weight[st];

        const std::uint32_t d = partial + static_cast<std::uint32_t>(p2);
        if (d <= threshold_) {
            out_.by_distance[d][0] += 1;
            out_.by_distance[d][1] += static_cast<std::uint64_t>(w_);
        }
    }
};

struct Task {
    int w;
    std::uint32_t first_lo, first_hi;
};

// One full enumeration below `threshold`. Tasks partition the search space by
// (input weight, block of the first one-position); merging in task order
// makes the result independent of scheduling.
Tally run_threshold(const Tables& tb, const GapMat* gm, const std::vector<std::uint32_t>& inv,
                    std::uint32_t L, int cap, std::uint32_t threshold,
                    const SpectrumOptions& opts) {
    std::vector<Task> tasks;
    const std::uint32_t blocks =
        opts.jobs > 1 ? std::min<std::uint32_t>(4 * static_cast<std::uint32_t>(opts.jobs), L) : 1;
    for (int w = 1; w <= cap; ++w) {
        if (static_cast<std::uint32_t>(w) > L) break;
        const std::uint32_t span = L - static_cast<std::uint32_t>(w) + 1;
        const std::uint32_t nb = std::min(blocks, span);
        for (std::uint32_t b = 0; b < nb; ++b) {
            const std::uint32_t lo = span * b / nb, hi = span * (b + 1) / nb;
            if (lo < hi) tasks.push_back({w, lo, hi});
        }
    }
    // Every task gets the full budget as its own ceiling: weight classes have
    // wildly uneven costs, and slicing the budget across them starves the
    // expensive class long before the total allowance is spent.
    std::vector<Tally> partial(tasks.size(), Tally(threshold));
    auto work = [&](std::size_t i) {
        WeightClassSearch search(tb, gm, inv, L, tasks[i].w, threshold, opts.node_budget,
                                 partial[i]);
        search.run(tasks[i].first_lo, tasks[i].first_hi);
    };
    static const bool trace = std::getenv("QPP_SPECTRUM_TRACE") != nullptr;
    if (opts.jobs <= 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            const auto t0 = std::chrono::steady_clock::now();
            work(i);
            if (trace)
                std::fprintf(stderr, "[spectrum] T=%u w=%d nodes=%llu (%.1fs)%s\n", threshold,
                             tasks[i].w, static_cast<unsigned long long>(partial[i].nodes),
                             std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                                 .count(),
                             partial[i].aborted ? " ABORTED" : "");
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        const int n = std::min<int>(opts.jobs, static_cast<int>(tasks.size()));
        for (int t = 0; t < n; ++t)
            pool.emplace_back([&] {
                for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) work(i);
            });
        for (auto& th : pool) th.join();
    }

    Tally total(threshold);
    for (const auto& p : partial) total.merge(p);
    return total;
}

std::vector<SpectrumTerm> collect_terms(const Tally& tally, int num_terms) {
    std::vector<SpectrumTerm> terms;
    for (std::uint32_t d = 0; d < tally.by_distance.size() &&
                              terms.size() < static_cast<std::size_t>(num_terms);
         ++d)
        if (tally.by_distance[d][0])
            terms.push_back({d, tally.by_distance[d][0], tally.by_distance[d][1]});
    return terms;
}

}  // namespace

DistanceSpectrum compute_spectrum(const Permutation& pi, const RscSpec& rsc, int num_terms,
                                  int input_weight_cap, const SpectrumOptions& opts) {
    if (num_terms < 1) throw std::invalid_argument("num_terms must be positive");
    if (input_weight_cap < 1 || input_weight_cap > kMaxWeight)
        throw std::invalid_argument("input weight cap out of range");
    const std::uint32_t L = pi.size();
    const RscTrellis trellis(rsc);
    const Tables tb(trellis);
    const auto gm = build_gap_tables(tb, L, input_weight_cap);
    const auto inv = pi.inverse();
    const std::uint32_t d_ceiling = 3 * L + 4 * static_cast<std::uint32_t>(rsc.memory);

    DistanceSpectrum out;
    out.num_terms_requested = num_terms;
    out.input_weight_cap = input_weight_cap;

    // Escalate the distance threshold one level at a time, starting from a
    // free lower bound on the minimum distance (both encoders bounded
    // independently). Passes below the true minimum prune everything at the
    // root and cost next to nothing, while per-pass cost grows so steeply
    // with the threshold that the ladder totals only a small multiple of the
    // single pass at the final (thus minimal) threshold. Overshooting even a
    // couple of levels would cost far more.
    std::uint32_t threshold = d_ceiling;
    for (int w = 1; w <= input_weight_cap && static_cast<std::uint32_t>(w) <= L; ++w)
        threshold = std::min(
            threshold, static_cast<std::uint32_t>(w) + 2u * static_cast<std::uint32_t>(
                                                              tb.completion[0][w]));
    threshold = std::max(threshold, std::min(opts.threshold_floor, d_ceiling));
    for (;;) {
        Tally full = run_threshold(tb, gm.get(), inv, L, input_weight_cap, threshold, opts);
        out.nodes_visited += full.nodes;
        out.threshold_used = threshold;
        out.terms = collect_terms(full, num_terms);
        if (full.aborted) {
            out.truncated = true;
            return out;
        }
        if (out.terms.size() == static_cast<std::size_t>(num_terms) || threshold >= d_ceiling)
            return out;
        threshold = std::min(threshold + 1, d_ceiling);
    }
}

DistanceSpectrum spectrum_oracle(const Permutation& pi, const RscSpec& rsc, int max_input_weight,
                                 std::uint64_t max_patterns) {
    const std::uint32_t L = pi.size();
    long double total = 0;
    for (int w = 1; w <= max_input_weight; ++w) {
        long double c = 1;
        for (int i = 0; i < w; ++i) c = c * (L - i) / (i + 1);
        total += c;
    }
    if (total > static_cast<long double>(max_patterns))
        throw BudgetExceeded("oracle refuses " + std::to_string(static_cast<double>(total)) +
                             " patterns (budget " + std::to_string(max_patterns) + ")");

    TurboCodecConfig cfg{pi};
    cfg.rsc = rsc;
    std::vector<std::array<std::uint64_t, 2>> tally(3 * L + 4 * rsc.memory + 1, {0, 0});
    std::vector<std::uint8_t> bits(L, 0);
    for (int w = 1; w <= max_input_weight; ++w) {
        std::vector<std::uint32_t> idx(w);
        for (int i = 0; i < w; ++i) idx[i] = i;
        for (;;) {
            for (auto i : idx) bits[i] = 1;
            const auto d = turbo_encode(bits, cfg).weight();
            tally[d][0] += 1;
            tally[d][1] += static_cast<std::uint64_t>(w);
            for (auto i : idx) bits[i] = 0;
            int j = w - 1;
            while (j >= 0 && idx[j] == L - static_cast<std::uint32_t>(w - j)) --j;
            if (j < 0) break;
            ++idx[j];
            for (int k = j + 1; k < w; ++k) idx[k] = idx[k - 1] + 1;
        }
    }

    DistanceSpectrum out;
    out.num_terms_requested = -1;
    out.input_weight_cap = max_input_weight;
    out.threshold_used = 3 * L + 4 * static_cast<std::uint32_t>(rsc.memory);
    for (std::uint32_t d = 0; d < tally.size(); ++d)
        if (tally[d][0]) out.terms.push_back({d, tally[d][0], tally[d][1]});
    return out;
}

}  // namespace qpp
