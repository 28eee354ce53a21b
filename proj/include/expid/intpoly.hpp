#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "expid/errors.hpp"

namespace expid {

/// Product of variable powers. Factors are kept sorted by variable index and
/// never carry a zero exponent (absent variable = exponent 0).
class Monomial {
public:
    Monomial() = default;

    static Monomial variable(std::uint32_t var, std::uint32_t exponent = 1);

    std::uint64_t total_degree() const;
    std::uint32_t exponent_of(std::uint32_t var) const;
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& factors() const { return factors_; }
    bool is_unit() const { return factors_.empty(); }

    Monomial operator*(const Monomial& other) const;
    bool operator==(const Monomial& other) const { return factors_ == other.factors_; }

private:
    std::vector<std::pair<std::uint32_t, std::uint32_t>> factors_;
};

/// Graded-lexicographic order with the largest term first: higher total degree
/// wins, ties broken by the exponent of the smallest-index variable.
struct GradedLexGreater {
    bool operator()(const Monomial& a, const Monomial& b) const;
};

/// Multivariate polynomial with unbounded integer coefficients in canonical
/// sparse form: no zero coefficients, terms ordered graded-lexicographically.
class SparsePoly {
public:
    using TermMap = std::map<Monomial, mpz_class, GradedLexGreater>;

    explicit SparsePoly(std::uint32_t num_vars = 0) : num_vars_(num_vars) {}

    static SparsePoly constant(std::uint32_t num_vars, mpz_class value);
    static SparsePoly variable(std::uint32_t num_vars, std::uint32_t var);

    std::uint32_t num_vars() const { return num_vars_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    /// Accumulates coefficient * monomial, dropping the term if it cancels.
    void add_term(const Monomial& m, const mpz_class& coefficient);

    SparsePoly operator+(const SparsePoly& other) const;
    SparsePoly operator-(const SparsePoly& other) const;
    SparsePoly operator*(const SparsePoly& other) const;
    SparsePoly negate() const;
    bool operator==(const SparsePoly& other) const {
        return num_vars_ == other.num_vars_ && terms_ == other.terms_;
    }

    mpz_class eval_int(const std::vector<mpz_class>& point) const;
    std::uint64_t eval_mod(const std::vector<std::uint64_t>& point, std::uint64_t m) const;

    /// Total degree; 0 for the zero polynomial by convention.
    std::uint64_t degree() const;
    /// Max absolute coefficient; 0 for the zero polynomial.
    mpz_class weight() const;

    std::string to_string() const;
    static SparsePoly parse(const std::string& text, std::uint32_t num_vars);

private:
    void require_same_vars(const SparsePoly& other) const;

    std::uint32_t num_vars_;
    TermMap terms_;
};

} // namespace expid
