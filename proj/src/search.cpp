#include "qpp/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>
#include <utility>

#include "qpp/errors.hpp"
#include "qpp/spread.hpp"

namespace qpp {

namespace {

struct LengthDefaults {
    std::uint32_t length;
    double snr_db;
    int num_terms;
};

// SNR and spectrum depth used for the ranking at each tabulated length.
constexpr LengthDefaults kDefaults[] = {
    {40, 7.5, 9},  {128, 5.5, 7}, {144, 5.0, 7}, {184, 5.0, 7}, {240, 4.5, 7},
    {256, 4.5, 7}, {320, 4.0, 5}, {352, 3.5, 5}, {368, 3.5, 5}, {384, 3.0, 5},
    {400, 3.0, 5}, {408, 3.0, 5}, {416, 3.0, 5}, {424, 3.0, 5}, {448, 3.0, 3},
    {456, 3.0, 3}, {464, 3.0, 3}, {480, 3.0, 3}, {488, 3.0, 3}, {504, 3.0, 3},
};

template <class F>
void parallel_over(std::size_t n, int jobs, F&& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min<int>(jobs, static_cast<int>(n)); ++t)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
        });
    for (auto& th : pool) th.join();
}

RankedCandidate evaluate_candidate(const QppPolynomial& poly, const SearchConfig& cfg,
                                   SpectrumCache* cache) {
    RankedCandidate rc;
    rc.poly = poly;
    const auto perm = permutation_of(poly);
    rc.spread = spread_factor(perm).spread;
    std::optional<DistanceSpectrum> cached;
    if (cache) cached = cache->lookup(poly, cfg.num_terms, cfg.input_weight_cap);
    if (cached) {
        rc.spectrum = std::move(*cached);
    } else {
        SpectrumOptions opts = cfg.spectrum;
        opts.jobs = 1;  // parallelism lives at the candidate level
        rc.spectrum = compute_spectrum(perm, RscSpec::lte(), cfg.num_terms,
                                       cfg.input_weight_cap, opts);
        if (cache) cache->store(poly, rc.spectrum);
    }
    if (rc.spectrum.truncated) {
        rc.indeterminate = true;
        return rc;
    }
    const double rate = coding_rate(cfg.length).value();
    rc.tub_ber = tub_ber(rc.spectrum, cfg.length, rate, cfg.snr_db);
    rc.tub_fer = tub_fer(rc.spectrum, rate, cfg.snr_db);
    return rc;
}

}  // namespace

SearchConfig SearchConfig::defaults_for(std::uint32_t length) {
    SearchConfig cfg;
    cfg.length = length;
    cfg.snr_db = kDefaults[0].snr_db;
    for (const auto& d : kDefaults)
        if (d.length <= length) cfg.snr_db = d.snr_db;
    if (length < 128)
        cfg.num_terms = 9;
    else if (length <= 256)
        cfg.num_terms = 7;
    else if (length <= 424)
        cfg.num_terms = 5;
    else
        cfg.num_terms = 3;
    for (const auto& d : kDefaults)
        if (d.length == length) {
            cfg.snr_db = d.snr_db;
            cfg.num_terms = d.num_terms;
        }
    return cfg;
}

Stage1Result stage1_max_spread(const SearchConfig& config) {
    const auto domain = canonical_domain(config.length);
    Stage1Result out;
    out.valid_total = domain.size();

    std::vector<char> usable(domain.size(), 0);
    bool any_usable = false;
    for (std::size_t i = 0; i < domain.size(); ++i) {
        usable[i] = !is_degenerate(domain[i]);
        any_usable = any_usable || usable[i];
    }
    if (!any_usable)  // tiny lengths where every valid polynomial is degenerate
        std::fill(usable.begin(), usable.end(), 1);

    std::vector<std::uint32_t> spreads(domain.size(), 0);
    parallel_over(domain.size(), config.jobs, [&](std::size_t i) {
        if (usable[i]) spreads[i] = spread_factor(permutation_of(domain[i])).spread;
    });

    for (std::size_t i = 0; i < domain.size(); ++i) {
        if (!usable[i]) {
            ++out.degenerate_skipped;
            continue;
        }
        out.max_spread = std::max(out.max_spread, spreads[i]);
    }
    out.spread_floor = config.min_spread.value_or(out.max_spread);
    for (std::size_t i = 0; i < domain.size(); ++i)
        if (usable[i] && spreads[i] >= out.spread_floor) out.candidates.push_back(domain[i]);

    if (out.candidates.empty())
        throw std::runtime_error("no polynomial reaches spread " +
                                 std::to_string(out.spread_floor) + " at length " +
                                 std::to_string(config.length));
    return out;
}

SearchReport stage2_min_tub_fer(const Stage1Result& stage1, const SearchConfig& config,
                                SpectrumCache* cache) {
    if (stage1.candidates.empty()) throw std::invalid_argument("no candidates to rank");
    const std::size_t n = stage1.candidates.size();

    std::vector<std::uint32_t> spreads(n, 0);
    parallel_over(n, config.jobs, [&](std::size_t i) {
        spreads[i] = spread_factor(permutation_of(stage1.candidates[i])).spread;
    });

    const double rate = coding_rate(config.length).value();
    std::vector<RankedCandidate> ranked(n);
    std::vector<char> discarded(n, 0);
    std::vector<char> done(n, 0);
    std::vector<double> optimistic(n, 0.0);  // provable lower bound on each tub_fer
    std::vector<int> probe_floor(n, 0);
    std::atomic<double> best_so_far{std::numeric_limits<double>::infinity()};

    // Sweep 1: give every candidate a cheap, provable lower bound on its union
    // bound — the full cached spectrum when one exists, otherwise a one-term
    // probe at a reduced input-weight cap (every codeword the probe counts is
    // in the full spectrum too, so the partial bound can only undershoot).
    parallel_over(n, config.jobs, [&](std::size_t i) {
        const auto& poly = stage1.candidates[i];
        RankedCandidate rc;
        rc.poly = poly;
        rc.spread = spreads[i];
        std::optional<DistanceSpectrum> full;
        if (cache) full = cache->lookup(poly, config.num_terms, config.input_weight_cap);
        if (full && !full->truncated) {
            rc.spectrum = std::move(*full);
            rc.tub_ber = tub_ber(rc.spectrum, config.length, rate, config.snr_db);
            rc.tub_fer = tub_fer(rc.spectrum, rate, config.snr_db);
            optimistic[i] = rc.tub_fer;
            done[i] = 1;
            double cur = best_so_far.load();
            while (rc.tub_fer < cur && !best_so_far.compare_exchange_weak(cur, rc.tub_fer)) {
            }
            ranked[i] = std::move(rc);
            return;
        }
        SpectrumOptions opts = config.spectrum;
        opts.jobs = 1;  // parallelism lives at the candidate level
        const int probe_cap = std::min(config.input_weight_cap, 6);
        std::optional<DistanceSpectrum> probe;
        if (cache) probe = cache->lookup(poly, 1, probe_cap);
        if (!probe) {
            probe = compute_spectrum(permutation_of(poly), RscSpec::lte(), 1, probe_cap,
                                     opts);
            if (cache && !probe->truncated) cache->store(poly, *probe);
        }
        if (probe->truncated) {
            rc.spectrum = std::move(*probe);
            rc.indeterminate = true;
            ranked[i] = std::move(rc);
            return;
        }
        optimistic[i] = tub_fer(*probe, rate, config.snr_db);
        probe_floor[i] = probe->threshold_used;
        ranked[i] = std::move(rc);
    });

    // Sweep 2: evaluate in ascending order of the lower bound, most promising
    // first. The strongest bound then lands before almost anything else, and
    // the rest of the field exits at one of the two probe gates instead of
    // paying for the deep terms. The discard margin is far wider than the tie
    // window, so winners and ties are unaffected by evaluation order.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return optimistic[a] != optimistic[b] ? optimistic[a] < optimistic[b] : a < b;
    });
    parallel_over(n, config.jobs, [&](std::size_t oi) {
        const std::size_t i = order[oi];
        if (done[i] || ranked[i].indeterminate) return;
        const auto& poly = stage1.candidates[i];
        RankedCandidate rc = std::move(ranked[i]);
        if (optimistic[i] > best_so_far.load() * (1.0 + 1e-9)) {
            discarded[i] = 1;
            ranked[i] = std::move(rc);
            return;
        }
        SpectrumOptions opts = config.spectrum;
        opts.jobs = 1;
        const auto perm = permutation_of(poly);
        // Second gate: the exact leading term under the full cap. Still a
        // lower bound on the candidate's union bound, but it now carries the
        // whole minimum-distance multiplicity, which is what sinks most of
        // the candidates the light probe lets through.
        opts.threshold_floor = probe_floor[i];
        std::optional<DistanceSpectrum> head;
        if (cache) head = cache->lookup(poly, 1, config.input_weight_cap);
        if (!head) {
            head = compute_spectrum(perm, RscSpec::lte(), 1, config.input_weight_cap, opts);
            if (cache && !head->truncated) cache->store(poly, *head);
        }
        if (head->truncated) {
            rc.spectrum = std::move(*head);
            rc.indeterminate = true;
            ranked[i] = std::move(rc);
            return;
        }
        const double partial2 = tub_fer(*head, rate, config.snr_db);
        if (partial2 > best_so_far.load() * (1.0 + 1e-9)) {
            discarded[i] = 1;
            ranked[i] = std::move(rc);
            return;
        }
        opts.threshold_floor = head->threshold_used;
        auto full = compute_spectrum(perm, RscSpec::lte(), config.num_terms,
                                     config.input_weight_cap, opts);
        if (cache && !full.truncated) cache->store(poly, full);
        rc.spectrum = std::move(full);
        if (rc.spectrum.truncated) {
            rc.indeterminate = true;
            ranked[i] = std::move(rc);
            return;
        }
        rc.tub_ber = tub_ber(rc.spectrum, config.length, rate, config.snr_db);
        rc.tub_fer = tub_fer(rc.spectrum, rate, config.snr_db);
        double cur = best_so_far.load();
        while (rc.tub_fer < cur && !best_so_far.compare_exchange_weak(cur, rc.tub_fer)) {
        }
        ranked[i] = std::move(rc);
    });

    SearchReport rep;
    rep.length = config.length;
    rep.snr_db = config.snr_db;
    rep.num_terms = config.num_terms;
    rep.input_weight_cap = config.input_weight_cap;
    rep.min_spread = config.min_spread;
    rep.max_spread = stage1.max_spread;
    rep.valid_total = stage1.valid_total;
    rep.stage1_kept = stage1.candidates.size();

    double best_fer = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& rc = ranked[i];
        if (rc.indeterminate) {
            rep.indeterminate.push_back(rc.poly);
            continue;
        }
        if (discarded[i]) continue;
        best_fer = std::min(best_fer, rc.tub_fer);
    }
    if (!std::isfinite(best_fer))
        throw BudgetExceeded("every candidate spectrum hit the node budget; nothing rankable");

    bool first = true;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& rc = ranked[i];
        if (rc.indeterminate || discarded[i]) continue;
        if (rc.tub_fer <= best_fer * (1.0 + 1e-12)) {
            // Each canonical winner stands for two polynomials: itself and its
            // coefficient-shift twin, which generates the same permutation and
            // therefore ties exactly.
            rep.ties.push_back(rc.poly);
            rep.ties.push_back(shifted_twin(rc.poly));
            ++rep.canonical_tie_count;
            if (first) {
                rep.best = rc;
                first = false;
            }
        }
    }
    std::sort(rep.ties.begin(), rep.ties.end(), [](const auto& a, const auto& b) {
        return a.q1 != b.q1 ? a.q1 < b.q1 : a.q2 < b.q2;
    });
    rep.tie_count = rep.ties.size();
    return rep;
}

ReferenceComparison compare_with_reference(const SearchReport& report,
                                           const QppPolynomial& reference,
                                           SpectrumCache* cache) {
    if (reference.length != report.length)
        throw std::invalid_argument("reference length differs from report length");
    SearchConfig cfg;
    cfg.length = report.length;
    cfg.snr_db = report.snr_db;
    cfg.num_terms = report.num_terms;
    cfg.input_weight_cap = report.input_weight_cap;
    const auto rc = evaluate_candidate(reference, cfg, cache);
    if (rc.indeterminate)
        throw BudgetExceeded("reference spectrum hit the node budget");
    ReferenceComparison out;
    out.poly = reference;
    out.spread = rc.spread;
    out.spectrum = rc.spectrum;
    out.tub_ber = rc.tub_ber;
    out.tub_fer = rc.tub_fer;
    out.fer_ratio = rc.tub_fer / report.best.tub_fer;
    return out;
}

std::optional<QppPolynomial> lte_reference(std::uint32_t length) {
    // f1, f2 per block length, 3GPP TS 36.212 table 5.1.3-3 (40..512 slice)
    static constexpr std::pair<std::uint32_t, std::uint32_t> kF1F2[] = {
        {3, 10},    {7, 12},   {19, 42},  {7, 16},    {7, 18},   {11, 20},  {5, 22},
        {11, 24},   {7, 26},   {41, 84},  {103, 90},  {15, 32},  {9, 34},   {17, 108},
        {9, 38},    {21, 120}, {101, 84}, {21, 44},   {57, 46},  {23, 48},  {13, 50},
        {27, 52},   {11, 36},  {27, 56},  {85, 58},   {29, 60},  {33, 62},  {15, 32},
        {17, 198},  {33, 68},  {103, 210},{19, 36},   {19, 74},  {37, 76},  {19, 78},
        {21, 120},  {21, 82},  {115, 84}, {193, 86},  {21, 44},  {133, 90}, {81, 46},
        {45, 94},   {23, 48},  {243, 98}, {151, 40},  {155, 102},{25, 52},  {51, 106},
        {47, 72},   {91, 110}, {29, 168}, {29, 114},  {247, 58}, {29, 118}, {89, 180},
        {91, 122},  {157, 62}, {55, 84},  {31, 64},
    };
    if (length < 40 || length > 512 || length % 8 != 0) return std::nullopt;
    const auto [f1, f2] = kF1F2[(length - 40) / 8];
    return QppPolynomial{f1, f2, length};
}

}  // namespace qpp
