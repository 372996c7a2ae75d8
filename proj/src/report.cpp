#include "qpp/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include "qpp/version.hpp"

namespace qpp {

using nlohmann::json;

RunManifest make_manifest(const std::string& command, json config, std::uint64_t rng_seed) {
    RunManifest m;
    m.command = command;
    m.config = std::move(config);
    m.code_version = std::string("qpp ") + kVersion;
    m.rng_seed = rng_seed;
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    m.created_utc = buf;
    return m;
}

std::string display_sig4(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", value);
    return buf;
}

std::string full_precision(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

json to_json(const RunManifest& m) {
    return {{"command", m.command},       {"config", m.config},
            {"code_version", m.code_version}, {"rng_seed", m.rng_seed},
            {"created_utc", m.created_utc},   {"inputs", m.inputs},
            {"outputs", m.outputs}};
}

json to_json(const QppPolynomial& p) {
    return {{"q1", p.q1}, {"q2", p.q2}, {"length", p.length}};
}

// threshold_used and nodes_visited stay in memory only: they vary with cache
// state and budgets, and reports must be reproducible bit-for-bit
json to_json(const DistanceSpectrum& s) {
    json terms = json::array();
    for (const auto& t : s.terms)
        terms.push_back({t.distance, t.multiplicity, t.input_weight_sum});
    return {{"terms", terms},
            {"num_terms_requested", s.num_terms_requested},
            {"input_weight_cap", s.input_weight_cap},
            {"truncated", s.truncated}};
}

json to_json(const RankedCandidate& c, std::uint32_t) {
    json j{{"poly", to_json(c.poly)},
           {"spread", c.spread},
           {"spectrum", to_json(c.spectrum)},
           {"indeterminate", c.indeterminate}};
    if (!c.indeterminate) {
        j["tub_ber"] = c.tub_ber;
        j["tub_fer"] = c.tub_fer;
        j["tub_ber_display"] = display_sig4(c.tub_ber);
        j["tub_fer_display"] = display_sig4(c.tub_fer);
    }
    return j;
}

json to_json(const SearchReport& r) {
    json ties = json::array(), indet = json::array();
    for (const auto& p : r.ties) ties.push_back(to_json(p));
    for (const auto& p : r.indeterminate) indet.push_back(to_json(p));
    json j{{"length", r.length},
           {"snr_db", r.snr_db},
           {"num_terms", r.num_terms},
           {"input_weight_cap", r.input_weight_cap},
           {"max_spread", r.max_spread},
           {"valid_total", r.valid_total},
           {"stage1_kept", r.stage1_kept},
           {"best", to_json(r.best, r.length)},
           {"tie_count", r.tie_count},
           {"canonical_tie_count", r.canonical_tie_count},
           {"ties", ties},
           {"indeterminate", indet}};
    if (r.min_spread) j["min_spread"] = *r.min_spread;
    return j;
}

json to_json(const ReferenceComparison& c) {
    return {{"poly", to_json(c.poly)},
            {"spread", c.spread},
            {"spectrum", to_json(c.spectrum)},
            {"tub_ber", c.tub_ber},
            {"tub_fer", c.tub_fer},
            {"tub_ber_display", display_sig4(c.tub_ber)},
            {"tub_fer_display", display_sig4(c.tub_fer)},
            {"fer_ratio", c.fer_ratio},
            {"fer_ratio_display", display_sig4(c.fer_ratio)}};
}

json to_json(const SimResult& r) {
    json points = json::array();
    for (const auto& p : r.points)
        points.push_back({{"snr_db", p.snr_db},
                          {"frames", p.frames},
                          {"frame_errors", p.frame_errors},
                          {"fer", p.fer},
                          {"fer_display", display_sig4(p.fer)},
                          {"ci95_halfwidth", p.ci95_halfwidth},
                          {"mean_iterations", p.mean_iterations},
                          {"reached_error_target", p.reached_error_target}});
    return {{"points", points}, {"seed", r.seed}, {"rate", r.rate}};
}

SimResult sim_result_from_json(const json& j) {
    SimResult r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.rate = j.at("rate").get<double>();
    for (const auto& p : j.at("points")) {
        SnrPointResult pt;
        pt.snr_db = p.at("snr_db").get<double>();
        pt.frames = p.at("frames").get<std::uint64_t>();
        pt.frame_errors = p.at("frame_errors").get<std::uint64_t>();
        pt.fer = p.at("fer").get<double>();
        pt.ci95_halfwidth = p.at("ci95_halfwidth").get<double>();
        pt.mean_iterations = p.at("mean_iterations").get<double>();
        pt.reached_error_target = p.at("reached_error_target").get<bool>();
        r.points.push_back(pt);
    }
    return r;
}

DistanceSpectrum spectrum_from_json(const json& j) {
    DistanceSpectrum s;
    for (const auto& t : j.at("terms"))
        s.terms.push_back({t.at(0).get<std::uint32_t>(), t.at(1).get<std::uint64_t>(),
                           t.at(2).get<std::uint64_t>()});
    s.num_terms_requested = j.at("num_terms_requested").get<int>();
    s.input_weight_cap = j.at("input_weight_cap").get<int>();
    s.truncated = j.at("truncated").get<bool>();
    if (!s.terms.empty()) s.threshold_used = s.terms.back().distance;
    return s;
}

void write_report(const std::filesystem::path& path, const RunManifest& manifest,
                  const std::string& kind, json data) {
    json doc{{"schema_version", kReportSchemaVersion},
             {"manifest", to_json(manifest)},
             {"kind", kind},
             {"data", std::move(data)}};
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

json read_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    json doc = json::parse(in);
    if (doc.at("schema_version").get<int>() != kReportSchemaVersion)
        throw std::runtime_error("unsupported report schema in " + path.string());
    return doc;
}

void write_fer_csv(const std::filesystem::path& path, const SimResult& result) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "snr_db,fer,ci_halfwidth,frames,errors\n";
    for (const auto& p : result.points)
        out << full_precision(p.snr_db) << ',' << full_precision(p.fer) << ','
            << full_precision(p.ci95_halfwidth) << ',' << p.frames << ',' << p.frame_errors
            << '\n';
}

std::vector<double> parse_snr_sweep(const std::string& text) {
    const auto bad = [&] {
        return std::invalid_argument("bad SNR sweep '" + text + "' (want start:step:stop)");
    };
    std::vector<double> parts;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto colon = text.find(':', pos);
        const std::string piece =
            text.substr(pos, colon == std::string::npos ? std::string::npos : colon - pos);
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(piece, &used));
            if (used != piece.size()) throw bad();
        } catch (const std::logic_error&) {
            throw bad();
        }
        if (colon == std::string::npos) break;
        pos = colon + 1;
    }
    if (parts.size() == 1) return parts;
    if (parts.size() != 3) throw bad();
    const double start = parts[0], step = parts[1], stop = parts[2];
    if (step <= 0 || stop < start) throw bad();
    std::vector<double> out;
    for (double v = start; v <= stop + step / 2; v += step) out.push_back(v);
    return out;
}

}  // namespace qpp
