#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace qpp {

// Interleaver polynomial p(x) = (q1*x + q2*x^2) mod length, with p(0) = 0.
// length must be positive and even; coefficients are stored reduced mod length.
struct QppPolynomial {
    std::uint32_t q1 = 0;
    std::uint32_t q2 = 0;
    std::uint32_t length = 0;

    bool operator==(const QppPolynomial&) const = default;
};

// Throws std::invalid_argument if length is zero/odd or a coefficient is >= length.
void validate(const QppPolynomial& p);

// p(x) for all x in [0, length): a candidate permutation, not yet checked for
// bijectivity. Intermediate products are carried in 64 bits, so any length
// up to 2^16 is safe.
std::vector<std::uint32_t> evaluate(const QppPolynomial& p);

// True iff x -> p(x) is a bijection on [0, length).
bool is_permutation_polynomial(const QppPolynomial& p);

// True iff 2*q2 == 0 (mod length). Such a polynomial has a constant second
// difference of zero, i.e. it generates exactly the permutation of a purely
// linear interleaver, and the quadratic term is vacuous.
bool is_degenerate(const QppPolynomial& p);

// A bijection on [0, size). Construction checks bijectivity.
class Permutation {
public:
    // Throws std::invalid_argument unless map is a bijection on [0, map.size()).
    explicit Permutation(std::vector<std::uint32_t> map);

    // nullopt instead of throwing.
    static std::optional<Permutation> from_map(std::vector<std::uint32_t> map);

    std::uint32_t size() const { return static_cast<std::uint32_t>(map_.size()); }
    std::uint32_t operator()(std::uint32_t x) const { return map_[x]; }
    const std::vector<std::uint32_t>& map() const { return map_; }

    // inverse()[y] = x such that map[x] = y
    std::vector<std::uint32_t> inverse() const;

    bool operator==(const Permutation&) const = default;

private:
    struct Unchecked {};
    Permutation(std::vector<std::uint32_t> map, Unchecked) : map_(std::move(map)) {}

    std::vector<std::uint32_t> map_;
};

// Throws std::invalid_argument if p is not a permutation polynomial.
Permutation permutation_of(const QppPolynomial& p);

// The companion polynomial (q1 + L/2, (q2 + L/2) mod L): it generates the same
// permutation as p. Adding or subtracting L/2 to q2 is the same thing mod L.
QppPolynomial shifted_twin(const QppPolynomial& p);

// True iff a and b are linked by the coefficient-shift identity above (in
// either direction) or are equal. Throws if lengths differ. This is an
// equivalence on coefficient pairs; equivalent pairs generate identical
// permutations.
bool are_equivalent_by_shift(const QppPolynomial& a, const QppPolynomial& b);

// The representative with q1 < L/2 (p itself if already there).
QppPolynomial canonical_form(const QppPolynomial& p);

// All valid permutation polynomials with q1 in [0, L/2) and q2 in [0, L),
// in ascending (q1, q2) order. Every permutation generated by a valid
// polynomial with arbitrary q1 in [0, L) appears exactly here, since the
// shifted twin folds q1 >= L/2 into this range.
std::vector<QppPolynomial> canonical_domain(std::uint32_t length);

}  // namespace qpp
