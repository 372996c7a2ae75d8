#include "qpp/polynomial.hpp"

#include <stdexcept>
#include <string>

namespace qpp {

void validate(const QppPolynomial& p) {
    if (p.length == 0 || p.length % 2 != 0)
        throw std::invalid_argument("interleaver length must be positive and even, got " +
                                    std::to_string(p.length));
    if (p.q1 >= p.length || p.q2 >= p.length)
        throw std::invalid_argument("coefficients must be reduced mod length");
}

std::vector<std::uint32_t> evaluate(const QppPolynomial& p) {
    validate(p);
    const std::uint64_t L = p.length;
    std::vector<std::uint32_t> out(p.length);
    for (std::uint64_t x = 0; x < L; ++x)
        out[x] = static_cast<std::uint32_t>((p.q1 * x + p.q2 * x % L * x) % L);
    return out;
}

bool is_permutation_polynomial(const QppPolynomial& p) {
    validate(p);
    const std::uint64_t L = p.length;
    std::vector<bool> seen(p.length, false);
    for (std::uint64_t x = 0; x < L; ++x) {
        const auto y = (p.q1 * x + p.q2 * x % L * x) % L;
        if (seen[y]) return false;
        seen[y] = true;
    }
    return true;
}

bool is_degenerate(const QppPolynomial& p) {
    validate(p);
    return (2ull * p.q2) % p.length == 0;
}

Permutation::Permutation(std::vector<std::uint32_t> map) : map_(std::move(map)) {
    std::vector<bool> seen(map_.size(), false);
    for (auto y : map_) {
        if (y >= map_.size() || seen[y])
            throw std::invalid_argument("map is not a bijection on [0, size)");
        seen[y] = true;
    }
}

std::optional<Permutation> Permutation::from_map(std::vector<std::uint32_t> map) {
    std::vector<bool> seen(map.size(), false);
    for (auto y : map) {
        if (y >= map.size() || seen[y]) return std::nullopt;
        seen[y] = true;
    }
    return Permutation(std::move(map), Unchecked{});
}

std::vector<std::uint32_t> Permutation::inverse() const {
    std::vector<std::uint32_t> inv(map_.size());
    for (std::uint32_t x = 0; x < map_.size(); ++x) inv[map_[x]] = x;
    return inv;
}

Permutation permutation_of(const QppPolynomial& p) {
    auto perm = Permutation::from_map(evaluate(p));
    if (!perm)
        throw std::invalid_argument("(" + std::to_string(p.q1) + "," + std::to_string(p.q2) +
                                    ") is not a permutation polynomial mod " +
                                    std::to_string(p.length));
    return *perm;
}

QppPolynomial shifted_twin(const QppPolynomial& p) {
    validate(p);
    const std::uint32_t h = p.length / 2;
    return {(p.q1 + h) % p.length, (p.q2 + h) % p.length, p.length};
}

bool are_equivalent_by_shift(const QppPolynomial& a, const QppPolynomial& b) {
    validate(a);
    validate(b);
    if (a.length != b.length)
        throw std::invalid_argument("cannot compare polynomials of different lengths");
    return a == b || shifted_twin(a) == b;
}

QppPolynomial canonical_form(const QppPolynomial& p) {
    validate(p);
    return p.q1 < p.length / 2 ? p : shifted_twin(p);
}

std::vector<QppPolynomial> canonical_domain(std::uint32_t length) {
    validate({0, 0, length});
    std::vector<QppPolynomial> out;
    for (std::uint32_t q1 = 0; q1 < length / 2; ++q1)
        for (std::uint32_t q2 = 0; q2 < length; ++q2)
            if (QppPolynomial p{q1, q2, length}; is_permutation_polynomial(p))
                out.push_back(p);
    return out;
}

}  // namespace qpp
