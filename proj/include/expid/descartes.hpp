#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "expid/field.hpp"

namespace expid {

/// k-sparse univariate polynomial beta_1*z^alpha_1 + ... + beta_k*z^alpha_k
/// with exponents in F_q (strictly increasing) and nonzero coefficients in
/// F_p.
struct SparseUnivariate {
    std::vector<std::uint64_t> alphas;
    std::vector<std::uint64_t> betas;
};

/// Validates lengths, distinct increasing exponents, nonzero coefficients.
SparseUnivariate make_sparse_univariate(std::vector<std::uint64_t> alphas,
                                        std::vector<std::uint64_t> betas);

/// Exact number of z in {a^0, ..., a^(q-1)} with f(z) = 0 mod p, computed
/// incrementally in O(k*q) multiplications.
std::uint64_t count_roots_in_subgroup(const SparseUnivariate& f, const FieldParams& params);

/// Exponent rotation alpha_i -> c*alpha_i mod q; preserves the number of
/// roots in the subgroup.
SparseUnivariate rotate_exponents(const SparseUnivariate& f, std::uint64_t c, std::uint64_t q);

struct KelleyReport {
    std::uint64_t symmetric_c = 0;   // first c minimizing the symmetric residue
    std::uint64_t symmetric_max = 0; // max_i min(a_i*c mod N, N - a_i*c mod N) at that c
    std::uint64_t one_sided_c = 0;   // first c minimizing the one-sided residue
    std::uint64_t one_sided_max = 0; // max_i (a_i*c mod N) at that c
    double bound = 0.0;              // N / n^(1/t)
    bool symmetric_met = false;
    bool one_sided_met = false;
};

/// Exhaustive multiplier search over c in {1, ..., range-1}, reporting both
/// the symmetric optimum and whether the one-sided bound N/n^(1/t) is met.
KelleyReport kelley_search(const std::vector<std::uint64_t>& alphas, std::uint64_t modulus,
                           std::uint64_t range);

struct ScanReport {
    std::uint64_t k = 0;
    std::uint64_t p = 0;
    std::uint64_t q = 0;
    std::uint64_t instances = 0;
    std::uint64_t max_count = 0;
    SparseUnivariate argmax;
    double paper_bound = 0.0;      // q^(1-1/(k-1))
    double safe_bound = 0.0;       // 2*q^(1-1/(k-1))
    std::uint64_t paper_violations = 0;
    std::uint64_t safe_violations = 0;
};

/// Exhaustive root-count scan over all normalized instances (alpha_1 = 0,
/// beta_1 = 1); throws SpaceTooLarge past 10^7 instances.
ScanReport exhaustive_bound_scan(std::uint64_t k, const FieldParams& params,
                                 unsigned threads = 1);

struct ConjectureReport {
    std::uint64_t samples = 0;
    std::uint64_t max_count = 0;
    double max_fraction = 0.0; // max_count / q
    SparseUnivariate argmax;
};

/// Random-instance scan of the root fraction at width k.
ConjectureReport conjecture_scan(const FieldParams& params, std::uint64_t k,
                                 std::uint64_t samples, std::uint64_t seed);

struct CrtReport {
    bool exhaustive = false;
    std::uint64_t elements = 0; // polynomials enumerated or sampled
    std::uint64_t collisions = 0;
    std::uint64_t pairs_checked = 0;
    std::uint64_t failures = 0; // homomorphism-law failures
    bool bijective = false;
};

/// Property check of the evaluation map F_p[x]/(x^q - 1) -> F_p^q,
/// f -> (f(1), f(g), ..., f(g^(q-1))): exhaustive bijectivity when p^q <= 1e6,
/// sampled injectivity otherwise, plus the ring-homomorphism laws on sampled
/// pairs.
CrtReport verify_crt_isomorphism(std::uint64_t p, std::uint64_t q, std::uint64_t seed);

std::string scan_report_csv_header();
std::string scan_report_csv_row(const ScanReport& report);

} // namespace expid
