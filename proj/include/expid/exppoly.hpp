#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "expid/field.hpp"
#include "expid/intpoly.hpp"

namespace expid {

/// One summand f * exp(g / h). The exponent fraction is never simplified by
/// polynomial division; exp(x) and exp((x^2-2x)/(x-2)) are distinct terms.
struct ExpTerm {
    SparsePoly f;
    SparsePoly g;
    SparsePoly h;
};

enum class SignClass { Zero, NonZero, Undefined };

/// Formal sum of ExpTerms. Terms are kept in construction order and are never
/// merged implicitly; merging happens only through condense().
class ExpPoly {
public:
    explicit ExpPoly(std::uint32_t num_vars = 0) : num_vars_(num_vars) {}

    /// Embeds a plain polynomial as f * exp(0/1); the zero polynomial becomes
    /// the empty sum.
    static ExpPoly from_poly(const SparsePoly& f);
    static ExpPoly single(SparsePoly f, SparsePoly g, SparsePoly h);

    std::uint32_t num_vars() const { return num_vars_; }
    std::uint64_t width() const { return terms_.size(); }
    const std::vector<ExpTerm>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    void append(ExpTerm term);

    struct Metrics {
        std::uint64_t width = 0;
        std::uint64_t degree = 0;
        mpz_class weight;
    };
    Metrics metrics() const;

    bool has_zero_denominator() const;

    /// Merges terms whose exponent fractions satisfy g_i*h_j - g_j*h_i = 0,
    /// summing coefficient polynomials; classes that sum to zero are dropped.
    /// The representative of each class is its lowest-index member. Throws
    /// EmptyDomainError when some h is the zero polynomial.
    ExpPoly condense() const;

    /// Sum_i f_i(u) * a^(g_i(v) * h_i(v)^-1 mod q) mod p, or nullopt when
    /// h_i(v) = 0 mod q for some i.
    std::optional<std::uint64_t> eval_finite(const std::vector<std::uint64_t>& u,
                                             const std::vector<std::uint64_t>& v,
                                             const FieldParams& params) const;

    /// Exact sign classification at an integer point. Terms are grouped by
    /// equal rational exponents (cross-multiplication over exact integers) and
    /// coefficients summed within each group; a sum of exponentials with
    /// distinct rational exponents and nonzero coefficients is never zero, so
    /// the value is Zero exactly when every group sum vanishes.
    SignClass rational_sign_class(const std::vector<mpz_class>& point) const;

    /// True when every term has exponent fraction 0/1.
    bool is_trivial_poly() const;
    /// Sum of coefficient polynomials; requires is_trivial_poly().
    SparsePoly to_sparse_poly() const;

    std::string to_string() const;
    static ExpPoly parse(const std::string& text, std::uint32_t num_vars);

    bool operator==(const ExpPoly& other) const;

private:
    std::uint32_t num_vars_;
    std::vector<ExpTerm> terms_;
};

/// Term-list concatenation; width adds.
ExpPoly ep_add(const ExpPoly& a, const ExpPoly& b);

/// Cross product of terms: f_i*f'_j * exp((g_i*h'_j + g'_j*h_i) / (h_i*h'_j)).
ExpPoly ep_mul(const ExpPoly& a, const ExpPoly& b);

} // namespace expid
