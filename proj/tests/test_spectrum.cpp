#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <vector>

#include "qpp/cache.hpp"
#include "qpp/errors.hpp"
#include "qpp/spectrum.hpp"

using namespace qpp;

namespace {

struct Term {
    std::uint32_t d;
    std::uint64_t n, w;
};

// Weight tallies for the three 40-bit interleavers of interest with input
// weight capped at 6, frozen from a standalone exhaustive enumeration (all
// sum-of-C(40,w) patterns encoded one by one) run before this implementation
// existed.
const std::vector<Term> kHead_3_10 = {{11, 1, 3},    {12, 1, 2},    {13, 2, 4},
                                      {14, 1, 2},    {15, 2, 4},    {16, 5, 14},
                                      {17, 17, 51},  {18, 13, 40},  {19, 34, 132},
                                      {20, 63, 252}, {21, 103, 387}, {22, 261, 1360}};
const std::vector<Term> kHead_13_30 = {{12, 1, 2},   {13, 1, 3},    {14, 2, 4},
                                       {15, 1, 3},   {16, 4, 10},   {17, 7, 17},
                                       {18, 42, 200}, {19, 43, 179}, {20, 88, 370},
                                       {21, 86, 342}, {22, 223, 1162}, {23, 363, 1655}};
const std::vector<Term> kHead_19_30 = {{14, 2, 4},    {15, 10, 30},  {16, 28, 108},
                                       {17, 61, 211}, {18, 87, 450}, {19, 96, 412},
                                       {20, 177, 812}, {21, 164, 748}, {22, 460, 2392},
                                       {23, 548, 2584}, {24, 853, 4744}, {25, 643, 3041}};

void check_terms(const DistanceSpectrum& s, const std::vector<Term>& expect) {
    REQUIRE(s.terms.size() >= expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i) {
        CHECK(s.terms[i].distance == expect[i].d);
        CHECK(s.terms[i].multiplicity == expect[i].n);
        CHECK(s.terms[i].input_weight_sum == expect[i].w);
    }
}

}  // namespace

TEST_CASE("frozen weight-capped tallies at length 40") {
    const auto rsc = RscSpec::lte();
    check_terms(compute_spectrum(permutation_of({3, 10, 40}), rsc, 12, 6), kHead_3_10);
    check_terms(compute_spectrum(permutation_of({13, 30, 40}), rsc, 12, 6), kHead_13_30);
    check_terms(compute_spectrum(permutation_of({19, 30, 40}), rsc, 12, 6), kHead_19_30);
}

TEST_CASE("search agrees with plain enumeration") {
    const auto rsc = RscSpec::lte();

    SUBCASE("length 40, input weight up to 6") {
        const auto pi = permutation_of({3, 10, 40});
        const auto oracle = spectrum_oracle(pi, rsc, 6);
        const auto fast = compute_spectrum(pi, rsc, 12, 6);
        REQUIRE(oracle.terms.size() >= 12);
        for (std::size_t i = 0; i < 12; ++i) {
            CHECK(fast.terms[i].distance == oracle.terms[i].distance);
            CHECK(fast.terms[i].multiplicity == oracle.terms[i].multiplicity);
            CHECK(fast.terms[i].input_weight_sum == oracle.terms[i].input_weight_sum);
        }
    }

    SUBCASE("length 16, full input weight cap") {
        const auto pi = permutation_of({1, 4, 16});
        const auto oracle = spectrum_oracle(pi, rsc, 10);
        const auto fast = compute_spectrum(pi, rsc, 6, 10);
        REQUIRE(fast.terms.size() == 6);
        for (std::size_t i = 0; i < 6; ++i) {
            CHECK(fast.terms[i].distance == oracle.terms[i].distance);
            CHECK(fast.terms[i].multiplicity == oracle.terms[i].multiplicity);
            CHECK(fast.terms[i].input_weight_sum == oracle.terms[i].input_weight_sum);
        }
    }

    SUBCASE("length 8: entire spectrum, term count included") {
        const auto pi = permutation_of({1, 2, 8});
        const auto oracle = spectrum_oracle(pi, rsc, 8);
        const auto fast = compute_spectrum(pi, rsc, 1000, 8);
        CHECK_FALSE(fast.truncated);
        REQUIRE(fast.terms.size() == oracle.terms.size());
        for (std::size_t i = 0; i < fast.terms.size(); ++i) {
            CHECK(fast.terms[i].distance == oracle.terms[i].distance);
            CHECK(fast.terms[i].multiplicity == oracle.terms[i].multiplicity);
            CHECK(fast.terms[i].input_weight_sum == oracle.terms[i].input_weight_sum);
        }
    }
}

TEST_CASE("leading terms are stable as num_terms grows") {
    const auto rsc = RscSpec::lte();
    const auto pi = permutation_of({13, 30, 40});
    const auto three = compute_spectrum(pi, rsc, 3, 10);
    const auto nine = compute_spectrum(pi, rsc, 9, 10);
    REQUIRE(three.terms.size() == 3);
    REQUIRE(nine.terms.size() == 9);
    for (std::size_t i = 0; i < 3; ++i) CHECK(three.terms[i] == nine.terms[i]);
}

TEST_CASE("reference head values at full cap") {
    const auto rsc = RscSpec::lte();
    const auto s40 = compute_spectrum(permutation_of({3, 10, 40}), rsc, 1, 10);
    CHECK(s40.terms[0] == SpectrumTerm{11, 1, 3});
    const auto b40 = compute_spectrum(permutation_of({13, 30, 40}), rsc, 1, 10);
    CHECK(b40.terms[0] == SpectrumTerm{12, 1, 2});
    const auto c40 = compute_spectrum(permutation_of({19, 30, 40}), rsc, 1, 10);
    CHECK(c40.terms[0] == SpectrumTerm{14, 2, 4});
}

TEST_CASE("results do not depend on the worker count") {
    const auto rsc = RscSpec::lte();
    const auto pi = permutation_of({13, 30, 40});
    SpectrumOptions one, three;
    one.jobs = 1;
    three.jobs = 3;
    const auto a = compute_spectrum(pi, rsc, 5, 10, one);
    const auto b = compute_spectrum(pi, rsc, 5, 10, three);
    CHECK(a.terms == b.terms);
    CHECK(a.truncated == b.truncated);
    CHECK(a.threshold_used == b.threshold_used);
}

TEST_CASE("node budget exhaustion is flagged") {
    SpectrumOptions opts;
    opts.node_budget = 50;
    const auto s = compute_spectrum(permutation_of({13, 30, 40}), RscSpec::lte(), 9, 10, opts);
    CHECK(s.truncated);
}

TEST_CASE("oracle refuses oversized enumerations up front") {
    CHECK_THROWS_AS(spectrum_oracle(permutation_of({3, 10, 40}), RscSpec::lte(), 10),
                    BudgetExceeded);
}

TEST_CASE("spectrum cache") {
    const auto dir = std::filesystem::temp_directory_path() / "qpp-cache-test";
    std::filesystem::remove_all(dir);
    const auto file = dir / "spectra.jsonl";
    const QppPolynomial poly{13, 30, 40};
    const auto spec = compute_spectrum(permutation_of(poly), RscSpec::lte(), 9, 10);

    SUBCASE("store, lookup, prefix service, persistence") {
        {
            SpectrumCache cache(file);
            CHECK_FALSE(cache.lookup(poly, 9, 10).has_value());
            cache.store(poly, spec);
            auto hit = cache.lookup(poly, 9, 10);
            REQUIRE(hit.has_value());
            CHECK(hit->terms == spec.terms);
            auto prefix = cache.lookup(poly, 4, 10);
            REQUIRE(prefix.has_value());
            CHECK(prefix->terms ==
                  std::vector<SpectrumTerm>(spec.terms.begin(), spec.terms.begin() + 4));
            CHECK_FALSE(cache.lookup(poly, 10, 10).has_value());  // deeper than stored
            CHECK_FALSE(cache.lookup(poly, 9, 6).has_value());    // different cap
            CHECK_FALSE(cache.lookup({3, 10, 40}, 9, 10).has_value());
        }
        SpectrumCache reloaded(file);  // fresh instance reads the file back
        CHECK(reloaded.rows() == 1);
        auto hit = reloaded.lookup(poly, 9, 10);
        REQUIRE(hit.has_value());
        CHECK(hit->terms == spec.terms);
    }

    SUBCASE("truncated results are not stored") {
        SpectrumCache cache(file);
        DistanceSpectrum bad = spec;
        bad.truncated = true;
        cache.store(poly, bad);
        CHECK_FALSE(cache.lookup(poly, 1, 10).has_value());
    }

    std::filesystem::remove_all(dir);
}
