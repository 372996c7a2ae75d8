#include <doctest.h>

#include <algorithm>
#include <set>
#include <stdexcept>

#include "qpp/polynomial.hpp"

using namespace qpp;

TEST_CASE("validate rejects malformed polynomials") {
    CHECK_THROWS_AS(validate({0, 0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(validate({0, 0, 7}), std::invalid_argument);
    CHECK_THROWS_AS(validate({8, 0, 8}), std::invalid_argument);
    CHECK_THROWS_AS(validate({0, 8, 8}), std::invalid_argument);
    CHECK_NOTHROW(validate({7, 7, 8}));
}

TEST_CASE("evaluate produces the quadratic map") {
    const auto map = evaluate({1, 2, 8});
    CHECK(map == std::vector<std::uint32_t>{0, 3, 2, 5, 4, 7, 6, 1});
    CHECK(evaluate({0, 0, 4}) == std::vector<std::uint32_t>{0, 0, 0, 0});
}

TEST_CASE("permutation check") {
    CHECK(is_permutation_polynomial({1, 2, 8}));
    CHECK(is_permutation_polynomial({3, 10, 40}));
    CHECK(is_permutation_polynomial({13, 30, 40}));
    CHECK_FALSE(is_permutation_polynomial({2, 2, 8}));  // x=1 and x=2 both map to 4
    CHECK_FALSE(is_permutation_polynomial({0, 0, 8}));
}

TEST_CASE("degenerate means the quadratic term adds nothing") {
    CHECK(is_degenerate({3, 0, 40}));
    CHECK(is_degenerate({3, 20, 40}));
    CHECK_FALSE(is_degenerate({3, 10, 40}));
    CHECK_FALSE(is_degenerate({1, 2, 8}));

    // a degenerate valid polynomial has a constant first difference, i.e. it
    // is some linear interleaver's permutation
    for (std::uint32_t L : {8u, 12u, 16u, 40u})
        for (std::uint32_t q1 = 0; q1 < L; ++q1)
            for (std::uint32_t q2 : {0u, L / 2})
                if (QppPolynomial p{q1, q2, L}; is_permutation_polynomial(p)) {
                    REQUIRE(is_degenerate(p));
                    const auto m = evaluate(p);
                    const std::uint32_t step = (m[1] + L - m[0]) % L;
                    for (std::uint32_t x = 0; x + 1 < L; ++x)
                        CHECK((m[x + 1] + L - m[x]) % L == step);
                }
}

TEST_CASE("Permutation construction and inverse") {
    CHECK_THROWS_AS(Permutation({0, 0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(Permutation({0, 3, 1}), std::invalid_argument);
    CHECK_FALSE(Permutation::from_map({1, 1}).has_value());

    const Permutation p({2, 0, 3, 1});
    CHECK(p.size() == 4);
    CHECK(p(0) == 2);
    const auto inv = p.inverse();
    for (std::uint32_t x = 0; x < 4; ++x) CHECK(inv[p(x)] == x);
}

TEST_CASE("permutation_of rejects non-permutations") {
    CHECK_THROWS_AS(permutation_of({2, 2, 8}), std::invalid_argument);
    CHECK(permutation_of({1, 2, 8}).map() == evaluate({1, 2, 8}));
}

TEST_CASE("shifted twin generates the identical permutation") {
    const QppPolynomial a{13, 30, 40};
    const auto b = shifted_twin(a);
    CHECK(b == QppPolynomial{33, 10, 40});
    CHECK(shifted_twin(b) == a);
    CHECK(evaluate(a) == evaluate(b));
    CHECK(are_equivalent_by_shift(a, b));
    CHECK(are_equivalent_by_shift(a, a));
    CHECK_FALSE(are_equivalent_by_shift(a, QppPolynomial{3, 10, 40}));
    CHECK_THROWS_AS(are_equivalent_by_shift(a, QppPolynomial{1, 2, 8}),
                    std::invalid_argument);
}

TEST_CASE("canonical form folds q1 into the lower half") {
    CHECK(canonical_form({33, 10, 40}) == QppPolynomial{13, 30, 40});
    CHECK(canonical_form({13, 30, 40}) == QppPolynomial{13, 30, 40});
    CHECK(canonical_form({3, 10, 40}) == QppPolynomial{3, 10, 40});
}

TEST_CASE("canonical domain: ordering, validity, bounds") {
    const auto dom = canonical_domain(40);
    CHECK(!dom.empty());
    for (std::size_t i = 0; i < dom.size(); ++i) {
        CHECK(dom[i].q1 < 20);
        CHECK(dom[i].q2 < 40);
        CHECK(is_permutation_polynomial(dom[i]));
        if (i) CHECK(std::tie(dom[i - 1].q1, dom[i - 1].q2) < std::tie(dom[i].q1, dom[i].q2));
    }
    CHECK(dom.size() == 32);  // counted independently by exhaustive scan
}

TEST_CASE("both shift directions agree and the canonical domain is complete") {
    for (std::uint32_t L = 2; L <= 64; L += 2) {
        const std::uint32_t h = L / 2;
        std::set<std::vector<std::uint32_t>> full, canon;
        for (std::uint32_t q1 = 0; q1 < L; ++q1)
            for (std::uint32_t q2 = 0; q2 < L; ++q2) {
                const QppPolynomial p{q1, q2, L};
                if (!is_permutation_polynomial(p)) continue;
                const auto m = evaluate(p);
                full.insert(m);
                // adding and subtracting half the length modulo L are the
                // same shift; both must reproduce the permutation
                const QppPolynomial plus{(q1 + h) % L, (q2 + h) % L, L};
                const QppPolynomial minus{(q1 + h) % L, (q2 + L - h) % L, L};
                CHECK(plus == minus);
                CHECK(evaluate(plus) == m);
                CHECK(shifted_twin(p) == plus);
            }
        for (const auto& p : canonical_domain(L)) canon.insert(evaluate(p));
        CHECK(full == canon);
    }
}
