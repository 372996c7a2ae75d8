#include <doctest.h>

#include <stdexcept>

#include "qpp/bounds.hpp"

using namespace qpp;

namespace {
DistanceSpectrum single_term(std::uint32_t d, std::uint64_t n, std::uint64_t w) {
    DistanceSpectrum s;
    s.terms = {{d, n, w}};
    s.num_terms_requested = 1;
    s.input_weight_cap = 10;
    return s;
}
}  // namespace

TEST_CASE("coding rate as an exact fraction") {
    const auto r40 = coding_rate(40);
    CHECK(r40.num == 10);
    CHECK(r40.den == 33);
    CHECK(r40.value() == doctest::Approx(0.30303030303030304).epsilon(1e-15));

    const auto r448 = coding_rate(448);
    CHECK(r448.num == 112);
    CHECK(r448.den == 339);
    CHECK(r448.value() == doctest::Approx(0.3303834808259587).epsilon(1e-15));

    CHECK_THROWS_AS(coding_rate(0), std::invalid_argument);
}

TEST_CASE("frozen single-term bound values") {
    // d=11, N=1, w=3 at length 40, 7.5 dB, rate 40/132; reference numbers
    // from an independent arbitrary-precision evaluation of the closed form
    const auto s = single_term(11, 1, 3);
    const double rate = coding_rate(40).value();
    CHECK(tub_ber(s, 40, rate, 7.5) ==
          doctest::Approx(6.635039915120950e-7).epsilon(1e-12));
    CHECK(tub_fer(s, rate, 7.5) == doctest::Approx(8.846719886827933e-6).epsilon(1e-12));
}

TEST_CASE("bound scales linearly in the tallies") {
    const double rate = coding_rate(40).value();
    const auto one = single_term(12, 1, 2);
    const auto two = single_term(12, 2, 4);
    CHECK(tub_fer(two, rate, 6.0) == doctest::Approx(2.0 * tub_fer(one, rate, 6.0)));
    CHECK(tub_ber(two, 40, rate, 6.0) == doctest::Approx(2.0 * tub_ber(one, 40, rate, 6.0)));
}

TEST_CASE("two terms add up") {
    DistanceSpectrum s;
    s.terms = {{11, 1, 3}, {12, 1, 2}};
    const double rate = coding_rate(40).value();
    const double total = tub_fer(s, rate, 7.5);
    CHECK(total == doctest::Approx(tub_fer(single_term(11, 1, 3), rate, 7.5) +
                                   tub_fer(single_term(12, 1, 2), rate, 7.5))
                       .epsilon(1e-14));
}

TEST_CASE("bounds decrease strictly with SNR") {
    DistanceSpectrum s;
    s.terms = {{11, 1, 3}, {12, 1, 2}, {13, 2, 4}};
    const double rate = coding_rate(40).value();
    double prev_b = 1e9, prev_f = 1e9;
    for (double snr = 0; snr <= 12; snr += 0.5) {
        const double b = tub_ber(s, 40, rate, snr);
        const double f = tub_fer(s, rate, snr);
        CHECK(b < prev_b);
        CHECK(f < prev_f);
        prev_b = b;
        prev_f = f;
    }
}

TEST_CASE("truncated spectra are rejected") {
    auto s = single_term(11, 1, 3);
    s.truncated = true;
    CHECK_THROWS_AS(tub_fer(s, coding_rate(40).value(), 7.5), std::invalid_argument);
    CHECK_THROWS_AS(tub_ber(s, 40, coding_rate(40).value(), 7.5), std::invalid_argument);
}
