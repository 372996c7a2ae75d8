#include "qpp/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qpp/cache.hpp"
#include "qpp/errors.hpp"
#include "qpp/report.hpp"
#include "qpp/search.hpp"
#include "qpp/simulate.hpp"
#include "qpp/spread.hpp"
#include "qpp/version.hpp"

namespace qpp {

namespace {

using nlohmann::json;

QppPolynomial parse_poly(const std::string& text, std::uint32_t length) {
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw CLI::ValidationError("--poly", "expected q1,q2");
    try {
        const unsigned long q1 = std::stoul(text.substr(0, comma));
        const unsigned long q2 = std::stoul(text.substr(comma + 1));
        if (q1 >= length || q2 >= length)
            throw CLI::ValidationError("--poly", "coefficients must be below the length");
        return {static_cast<std::uint32_t>(q1), static_cast<std::uint32_t>(q2), length};
    } catch (const std::logic_error&) {
        throw CLI::ValidationError("--poly", "expected q1,q2 as nonnegative integers");
    }
}

std::string join_args(int argc, const char* const* argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

std::string poly_str(const QppPolynomial& p) {
    return std::to_string(p.q1) + "x+" + std::to_string(p.q2) + "x^2 mod " +
           std::to_string(p.length);
}

void print_spectrum(const DistanceSpectrum& s) {
    std::printf("  %-10s %-14s %s\n", "distance", "multiplicity", "input_weight_sum");
    for (const auto& t : s.terms)
        std::printf("  %-10u %-14llu %llu\n", t.distance,
                    static_cast<unsigned long long>(t.multiplicity),
                    static_cast<unsigned long long>(t.input_weight_sum));
    if (s.truncated) std::printf("  [incomplete: node budget exhausted]\n");
}

struct CommonState {
    std::string command_line;
    bool no_cache = false;
    std::string cache_dir;

    std::unique_ptr<SpectrumCache> open_cache() const {
        if (no_cache) return nullptr;
        auto path = cache_dir.empty() ? SpectrumCache::default_path()
                                      : std::filesystem::path(cache_dir) / "spectra.jsonl";
        return std::make_unique<SpectrumCache>(path);
    }
};

DistanceSpectrum spectrum_with_cache(const QppPolynomial& poly, int terms, int cap,
                                     const SpectrumOptions& opts, SpectrumCache* cache) {
    if (cache)
        if (auto hit = cache->lookup(poly, terms, cap)) return *hit;
    auto s = compute_spectrum(permutation_of(poly), RscSpec::lte(), terms, cap, opts);
    if (cache) cache->store(poly, s);
    return s;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"QPP interleaver design toolkit for turbo codes"};
    app.set_version_flag("--version", std::string("qpp ") + kVersion);
    app.require_subcommand(1);

    CommonState common;
    common.command_line = join_args(argc, argv);

    // shared option storage
    std::uint32_t length = 0;
    std::string poly_text, json_out, csv_out, ref_text, snr_text;
    int terms = 0, cap = 10, jobs = 1, iters = 12;
    double snr_db = std::numeric_limits<double>::quiet_NaN(), stop_llr = 10.0;
    std::uint64_t budget = SpectrumOptions{}.node_budget, seed = 1;
    std::uint64_t min_errors = 100, max_frames = 10'000'000;
    std::optional<std::uint32_t> min_d;
    bool no_ref = false;

    auto add_len_poly = [&](CLI::App* cmd) {
        cmd->add_option("--len", length, "interleaver length (positive even)")->required();
        cmd->add_option("--poly", poly_text, "coefficients q1,q2")->required();
    };
    auto add_cache_opts = [&](CLI::App* cmd) {
        cmd->add_flag("--no-cache", common.no_cache, "skip the spectrum cache");
        cmd->add_option("--cache-dir", common.cache_dir,
                        "cache directory (default $QPP_CACHE_DIR or .qpp-cache)");
    };

    auto* validate_cmd = app.add_subcommand("validate", "check a polynomial");
    add_len_poly(validate_cmd);
    validate_cmd->add_option("--json", json_out, "write a JSON report");

    auto* spread_cmd = app.add_subcommand("spread", "spread factor of a polynomial");
    add_len_poly(spread_cmd);
    spread_cmd->add_option("--json", json_out, "write a JSON report");

    auto* spectrum_cmd = app.add_subcommand("spectrum", "leading distance spectrum terms");
    add_len_poly(spectrum_cmd);
    spectrum_cmd->add_option("--terms", terms, "number of leading terms")->required();
    spectrum_cmd->add_option("--w-max", cap, "input weight cap (default 10)");
    spectrum_cmd->add_option("--budget", budget, "search node budget");
    spectrum_cmd->add_option("--jobs", jobs, "worker threads");
    spectrum_cmd->add_option("--json", json_out, "write a JSON report");
    add_cache_opts(spectrum_cmd);

    auto* tub_cmd = app.add_subcommand("tub", "truncated union bounds at one SNR");
    add_len_poly(tub_cmd);
    tub_cmd->add_option("--snr-db", snr_db, "information-bit SNR in dB")->required();
    tub_cmd->add_option("--terms", terms, "spectrum terms to use")->required();
    tub_cmd->add_option("--w-max", cap, "input weight cap (default 10)");
    tub_cmd->add_option("--budget", budget, "search node budget");
    tub_cmd->add_option("--jobs", jobs, "worker threads");
    tub_cmd->add_option("--json", json_out, "write a JSON report");
    add_cache_opts(tub_cmd);

    auto* search_cmd = app.add_subcommand("search", "two-stage interleaver search");
    search_cmd->add_option("length", length, "interleaver length")->required();
    search_cmd->add_option("--snr-db", snr_db, "ranking SNR (default per length)");
    search_cmd->add_option("--terms", terms, "spectrum depth (default per length)");
    search_cmd->add_option("--w-max", cap, "input weight cap (default 10)");
    search_cmd->add_option("--min-d", min_d, "keep spread >= this instead of max only");
    search_cmd->add_option("--budget", budget, "per-spectrum node budget");
    search_cmd->add_option("--jobs", jobs, "worker threads");
    search_cmd->add_option("--ref", ref_text, "reference q1,q2 (default: LTE table)");
    search_cmd->add_flag("--no-ref", no_ref, "skip the reference comparison");
    search_cmd->add_option("--json", json_out, "write a JSON report");
    add_cache_opts(search_cmd);

    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo FER over Rayleigh fading");
    add_len_poly(sim_cmd);
    sim_cmd->add_option("--snr-db", snr_text, "sweep start:step:stop in dB, or one value")
        ->required();
    sim_cmd->add_option("--seed", seed, "master RNG seed (default 1)");
    sim_cmd->add_option("--min-errors", min_errors, "frame errors per point (default 100)");
    sim_cmd->add_option("--max-frames", max_frames, "frame cap per point (default 1e7)");
    sim_cmd->add_option("--iters", iters, "decoder iterations (default 12)");
    sim_cmd->add_option("--stop-llr", stop_llr, "early-stop LLR threshold (default 10)");
    sim_cmd->add_option("--jobs", jobs, "worker threads");
    sim_cmd->add_option("--json", json_out, "write a JSON report");
    sim_cmd->add_option("--csv", csv_out, "write the FER curve as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (validate_cmd->parsed()) {
            const auto poly = parse_poly(poly_text, length);
            const bool ok = is_permutation_polynomial(poly);
            std::printf("poly: %s\n", poly_str(poly).c_str());
            std::printf("permutation: %s\n", ok ? "yes" : "no");
            json data{{"poly", to_json(poly)}, {"is_permutation", ok}};
            if (ok) {
                const bool degen = is_degenerate(poly);
                const auto twin = shifted_twin(poly);
                const auto canon = canonical_form(poly);
                std::printf("degenerate (linear-equivalent): %s\n", degen ? "yes" : "no");
                std::printf("coefficient-shift twin: %s\n", poly_str(twin).c_str());
                std::printf("canonical form: %s\n", poly_str(canon).c_str());
                data["degenerate"] = degen;
                data["twin"] = to_json(twin);
                data["canonical"] = to_json(canon);
            }
            if (!json_out.empty()) {
                auto m = make_manifest(common.command_line,
                                       json{{"len", length}, {"poly", poly_text}}, 0);
                m.outputs = {json_out};
                write_report(json_out, m, "validate", data);
            }
            return 0;
        }

        if (spread_cmd->parsed()) {
            const auto poly = parse_poly(poly_text, length);
            const auto res = spread_factor(permutation_of(poly));
            std::printf("poly: %s\n", poly_str(poly).c_str());
            std::printf("spread D = %u (witness pair %u,%u)\n", res.spread, res.witness.first,
                        res.witness.second);
            if (!json_out.empty()) {
                auto m = make_manifest(common.command_line,
                                       json{{"len", length}, {"poly", poly_text}}, 0);
                m.outputs = {json_out};
                write_report(json_out, m, "spread",
                             json{{"poly", to_json(poly)},
                                  {"spread", res.spread},
                                  {"witness", {res.witness.first, res.witness.second}}});
            }
            return 0;
        }

        if (spectrum_cmd->parsed()) {
            const auto poly = parse_poly(poly_text, length);
            auto cache = common.open_cache();
            SpectrumOptions opts{budget, jobs};
            const auto spec = spectrum_with_cache(poly, terms, cap, opts, cache.get());
            std::printf("poly: %s\n", poly_str(poly).c_str());
            print_spectrum(spec);
            if (!json_out.empty()) {
                auto m = make_manifest(
                    common.command_line,
                    json{{"len", length}, {"poly", poly_text}, {"terms", terms},
                         {"w_max", cap}, {"budget", budget}, {"jobs", jobs}},
                    0);
                m.outputs = {json_out};
                write_report(json_out, m, "spectrum",
                             json{{"poly", to_json(poly)}, {"spectrum", to_json(spec)}});
            }
            return spec.truncated ? 3 : 0;
        }

        if (tub_cmd->parsed()) {
            const auto poly = parse_poly(poly_text, length);
            auto cache = common.open_cache();
            SpectrumOptions opts{budget, jobs};
            const auto spec = spectrum_with_cache(poly, terms, cap, opts, cache.get());
            if (spec.truncated) {
                std::fprintf(stderr, "spectrum incomplete under budget; no bound\n");
                return 3;
            }
            const double rate = coding_rate(length).value();
            const double ber = tub_ber(spec, length, rate, snr_db);
            const double fer = tub_fer(spec, rate, snr_db);
            std::printf("poly: %s @ %.3g dB, %d terms\n", poly_str(poly).c_str(), snr_db,
                        terms);
            std::printf("TUB(BER) = %s\n", display_sig4(ber).c_str());
            std::printf("TUB(FER) = %s\n", display_sig4(fer).c_str());
            if (!json_out.empty()) {
                auto m = make_manifest(
                    common.command_line,
                    json{{"len", length}, {"poly", poly_text}, {"snr_db", snr_db},
                         {"terms", terms}, {"w_max", cap}},
                    0);
                m.outputs = {json_out};
                write_report(json_out, m, "tub",
                             json{{"poly", to_json(poly)},
                                  {"snr_db", snr_db},
                                  {"spectrum", to_json(spec)},
                                  {"tub_ber", ber},
                                  {"tub_fer", fer},
                                  {"tub_ber_display", display_sig4(ber)},
                                  {"tub_fer_display", display_sig4(fer)}});
            }
            return 0;
        }

        if (search_cmd->parsed()) {
            if (length % 2 != 0 || length < 8 || length > 512)
                throw CLI::ValidationError("length", "must be even and within 8..512");
            SearchConfig cfg = SearchConfig::defaults_for(length);
            if (!std::isnan(snr_db)) cfg.snr_db = snr_db;
            if (terms > 0) cfg.num_terms = terms;
            cfg.input_weight_cap = cap;
            cfg.min_spread = min_d;
            cfg.jobs = jobs;
            cfg.spectrum.node_budget = budget;

            auto cache = common.open_cache();
            const auto stage1 = stage1_max_spread(cfg);
            std::printf("stage 1: %zu valid polynomials, max spread %u, %zu kept\n",
                        stage1.valid_total, stage1.max_spread, stage1.candidates.size());
            auto report = stage2_min_tub_fer(stage1, cfg, cache.get());
            std::printf("best: %s  D=%u  d_min=%u  TUB(FER)=%s  ties=%zu\n",
                        poly_str(report.best.poly).c_str(), report.best.spread,
                        report.best.spectrum.terms.empty()
                            ? 0u
                            : report.best.spectrum.terms.front().distance,
                        display_sig4(report.best.tub_fer).c_str(), report.tie_count);
            for (const auto& t : report.ties)
                std::printf("  tie: (%u,%u)\n", t.q1, t.q2);
            for (const auto& t : report.indeterminate)
                std::printf("  indeterminate under budget: (%u,%u)\n", t.q1, t.q2);

            std::optional<ReferenceComparison> refcmp;
            if (!no_ref) {
                std::optional<QppPolynomial> ref;
                if (!ref_text.empty())
                    ref = parse_poly(ref_text, length);
                else
                    ref = lte_reference(length);
                if (ref && is_permutation_polynomial(*ref)) {
                    refcmp = compare_with_reference(report, *ref, cache.get());
                    std::printf("reference %s: d_min=%u TUB(FER)=%s ratio=%s\n",
                                poly_str(*ref).c_str(),
                                refcmp->spectrum.terms.empty()
                                    ? 0u
                                    : refcmp->spectrum.terms.front().distance,
                                display_sig4(refcmp->tub_fer).c_str(),
                                display_sig4(refcmp->fer_ratio).c_str());
                }
            }

            if (!json_out.empty()) {
                json cfg_json{{"length", cfg.length},     {"snr_db", cfg.snr_db},
                              {"num_terms", cfg.num_terms}, {"w_max", cfg.input_weight_cap},
                              {"budget", cfg.spectrum.node_budget}, {"jobs", cfg.jobs}};
                if (cfg.min_spread) cfg_json["min_d"] = *cfg.min_spread;
                auto m = make_manifest(common.command_line, cfg_json, 0);
                m.outputs = {json_out};
                json data = to_json(report);
                if (refcmp) data["reference"] = to_json(*refcmp);
                write_report(json_out, m, "search_report", data);
            }
            return report.indeterminate.empty() ? 0 : 3;
        }

        if (sim_cmd->parsed()) {
            const auto poly = parse_poly(poly_text, length);
            TurboCodecConfig codec{permutation_of(poly)};
            codec.max_iterations = iters;
            codec.llr_stop_threshold = stop_llr;
            ChannelConfig chan{parse_snr_sweep(snr_text)};
            StopRule stop{min_errors, max_frames};
            const auto result = simulate_fer(poly, codec, chan, stop, seed, jobs);
            std::printf("poly: %s  seed=%llu\n", poly_str(poly).c_str(),
                        static_cast<unsigned long long>(seed));
            for (const auto& p : result.points)
                std::printf("  %5.2f dB  FER=%s (+/-%s)  frames=%llu errors=%llu%s\n",
                            p.snr_db, display_sig4(p.fer).c_str(),
                            display_sig4(p.ci95_halfwidth).c_str(),
                            static_cast<unsigned long long>(p.frames),
                            static_cast<unsigned long long>(p.frame_errors),
                            p.reached_error_target ? "" : "  [frame cap]");
            json cfg_json{{"len", length},
                          {"poly", poly_text},
                          {"snr", snr_text},
                          {"min_errors", min_errors},
                          {"max_frames", max_frames},
                          {"iters", iters},
                          {"stop_llr", stop_llr},
                          {"jobs", jobs}};
            if (!json_out.empty()) {
                auto m = make_manifest(common.command_line, cfg_json, seed);
                m.outputs = {json_out};
                if (!csv_out.empty()) m.outputs.push_back(csv_out);
                write_report(json_out, m, "sim_result", to_json(result));
            }
            if (!csv_out.empty()) write_fer_csv(csv_out, result);
            return 0;
        }
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const BudgetExceeded& e) {
        std::fprintf(stderr, "budget: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal: %s\n", e.what());
        return 4;
    }
    return 4;  // unreachable: a subcommand is required
}

}  // namespace qpp
