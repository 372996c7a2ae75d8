#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpp/search.hpp"
#include "qpp/simulate.hpp"
#include "qpp/spectrum.hpp"

namespace qpp {

// Provenance block attached to every report file.
struct RunManifest {
    std::string command;           // argv joined
    nlohmann::json config;         // resolved parameters of the run
    std::string code_version;
    std::uint64_t rng_seed = 0;
    std::string created_utc;       // ISO 8601
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
};

RunManifest make_manifest(const std::string& command, nlohmann::json config,
                          std::uint64_t rng_seed);

// value with four significant digits, scientific when far from 1
std::string display_sig4(double value);
// shortest round-trip-exact decimal
std::string full_precision(double value);

nlohmann::json to_json(const RunManifest& m);
nlohmann::json to_json(const QppPolynomial& p);
nlohmann::json to_json(const DistanceSpectrum& s);
nlohmann::json to_json(const RankedCandidate& c, std::uint32_t length);
nlohmann::json to_json(const SearchReport& r);
nlohmann::json to_json(const ReferenceComparison& c);
nlohmann::json to_json(const SimResult& r);

SimResult sim_result_from_json(const nlohmann::json& j);
DistanceSpectrum spectrum_from_json(const nlohmann::json& j);

// {"schema_version": .., "manifest": .., "kind": .., "data": ..} written
// pretty-printed; read_report verifies the schema version.
void write_report(const std::filesystem::path& path, const RunManifest& manifest,
                  const std::string& kind, nlohmann::json data);
nlohmann::json read_report(const std::filesystem::path& path);

// columns: snr_db, fer, ci_halfwidth, frames, errors
void write_fer_csv(const std::filesystem::path& path, const SimResult& result);

// "start:step:stop" inclusive of stop (within half a step), or one number
std::vector<double> parse_snr_sweep(const std::string& text);

}  // namespace qpp
