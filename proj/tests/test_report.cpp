#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qpp/report.hpp"
#include "qpp/version.hpp"

using namespace qpp;
using nlohmann::json;

namespace {
SimResult sample_sim() {
    SimResult r;
    r.seed = 7;
    r.rate = 10.0 / 33.0;
    r.points.push_back({6.0, 12345, 321, 321.0 / 12345, 0.0025, 3.5, true});
    r.points.push_back({6.5, 50000, 99, 99.0 / 50000, 0.00027, 2.75, false});
    return r;
}
}  // namespace

TEST_CASE("sweep parsing") {
    CHECK(parse_snr_sweep("6:0.5:8") == std::vector<double>{6.0, 6.5, 7.0, 7.5, 8.0});
    CHECK(parse_snr_sweep("7.5") == std::vector<double>{7.5});
    CHECK(parse_snr_sweep("5:1:5") == std::vector<double>{5.0});
    const auto pts = parse_snr_sweep("1:0.2:2");
    REQUIRE(pts.size() == 6);
    CHECK(pts.back() == doctest::Approx(2.0));
    CHECK_THROWS(parse_snr_sweep("abc"));
    CHECK_THROWS(parse_snr_sweep("5:1"));
    CHECK_THROWS(parse_snr_sweep("3:0:4"));
    CHECK_THROWS(parse_snr_sweep("8:1:6"));
    CHECK_THROWS(parse_snr_sweep(""));
    CHECK_THROWS(parse_snr_sweep("1:2:3:4"));
}

TEST_CASE("display formatting") {
    CHECK(display_sig4(0.65389e-5) == "6.539e-06");
    CHECK(display_sig4(2.4750) == "2.475");
    CHECK(display_sig4(145.48) == "145.5");
    const double v = 0.30303030303030304;
    CHECK(std::stod(full_precision(v)) == v);
}

TEST_CASE("manifest carries provenance") {
    const auto m = make_manifest("qpp search 40", json{{"length", 40}}, 99);
    CHECK(m.command == "qpp search 40");
    CHECK(m.code_version == std::string("qpp ") + kVersion);
    CHECK(m.rng_seed == 99);
    CHECK(m.created_utc.size() == 20);  // 2026-01-02T03:04:05Z
    const auto j = to_json(m);
    CHECK(j.at("config").at("length") == 40);
}

TEST_CASE("report files round-trip") {
    const auto dir = std::filesystem::temp_directory_path() / "qpp-report-test";
    std::filesystem::remove_all(dir);
    const auto path = dir / "out.json";

    const auto sim = sample_sim();
    auto m = make_manifest("qpp simulate", json{{"len", 40}}, 7);
    m.outputs = {path.string()};
    write_report(path, m, "sim_result", to_json(sim));

    const auto doc = read_report(path);
    CHECK(doc.at("schema_version") == kReportSchemaVersion);
    CHECK(doc.at("kind") == "sim_result");
    CHECK(doc.at("manifest").at("rng_seed") == 7);
    const auto back = sim_result_from_json(doc.at("data"));
    REQUIRE(back.points.size() == sim.points.size());
    for (std::size_t i = 0; i < back.points.size(); ++i) {
        CHECK(back.points[i].snr_db == sim.points[i].snr_db);
        CHECK(back.points[i].frames == sim.points[i].frames);
        CHECK(back.points[i].frame_errors == sim.points[i].frame_errors);
        CHECK(back.points[i].fer == sim.points[i].fer);
        CHECK(back.points[i].ci95_halfwidth == sim.points[i].ci95_halfwidth);
        CHECK(back.points[i].mean_iterations == sim.points[i].mean_iterations);
        CHECK(back.points[i].reached_error_target == sim.points[i].reached_error_target);
    }
    CHECK(back.seed == sim.seed);
    CHECK(back.rate == sim.rate);
    std::filesystem::remove_all(dir);
}

TEST_CASE("spectrum serialization round-trips") {
    DistanceSpectrum s;
    s.terms = {{11, 1, 3}, {12, 4, 10}};
    s.num_terms_requested = 2;
    s.input_weight_cap = 10;
    const auto back = spectrum_from_json(to_json(s));
    CHECK(back == s);
    CHECK(back.terms == s.terms);
}

TEST_CASE("FER curves export as CSV") {
    const auto dir = std::filesystem::temp_directory_path() / "qpp-csv-test";
    std::filesystem::remove_all(dir);
    const auto path = dir / "curve.csv";
    write_fer_csv(path, sample_sim());

    std::ifstream in(path);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "snr_db,fer,ci_halfwidth,frames,errors");
    REQUIRE(std::getline(in, line));
    {
        std::stringstream ss(line);
        std::string field;
        std::getline(ss, field, ',');
        CHECK(std::stod(field) == 6.0);
        std::getline(ss, field, ',');
        CHECK(std::stod(field) == 321.0 / 12345);
        std::getline(ss, field, ',');
        CHECK(std::stod(field) == 0.0025);
        std::getline(ss, field, ',');
        CHECK(field == "12345");
        std::getline(ss, field, ',');
        CHECK(field == "321");
    }
    REQUIRE(std::getline(in, line));
    CHECK(line.substr(0, 4) == "6.5,");
    std::filesystem::remove_all(dir);
}

TEST_CASE("schema version is enforced") {
    const auto dir = std::filesystem::temp_directory_path() / "qpp-schema-test";
    std::filesystem::remove_all(dir);
    const auto path = dir / "bad.json";
    std::filesystem::create_directories(dir);
    std::ofstream(path) << R"({"schema_version": 999, "kind": "x", "data": {}})";
    CHECK_THROWS(read_report(path));
    std::filesystem::remove_all(dir);
}
