#pragma once

#include <cstdint>

#include "expid/errors.hpp"

namespace expid {

/// Moduli are capped so that any product of two residues fits in 128-bit
/// intermediates.
inline constexpr std::uint64_t kMaxModulus = std::uint64_t{1} << 62;

/// Paired prime moduli with a subgroup element: q | p-1 and a generates the
/// unique multiplicative subgroup of F_p^* of order q. The subgroup itself is
/// the implicit set {a^0, ..., a^(q-1)}.
struct FieldParams {
    std::uint64_t p = 0;
    std::uint64_t q = 0;
    std::uint64_t a = 0;
};

struct PrimePair {
    std::uint64_t q = 0;
    std::uint64_t p = 0;
};

std::uint64_t mod_mul(std::uint64_t x, std::uint64_t y, std::uint64_t m);

/// base^exponent mod m via binary exponentiation.
std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exponent, std::uint64_t m);

/// Multiplicative inverse modulo a prime. Throws ZeroInverse when x = 0 mod m.
std::uint64_t mod_inv(std::uint64_t x, std::uint64_t m);

/// Deterministic Miller-Rabin; exact for all n < 2^64.
bool is_prime(std::uint64_t n);

/// Smallest prime >= n. Throws SearchExhausted past the modulus cap.
std::uint64_t next_prime_at_least(std::uint64_t n);

/// Smallest prime q >= q_min together with the smallest prime p = m*q + 1.
PrimePair generate_prime_pair(std::uint64_t q_min);

/// Element of multiplicative order exactly q in F_p^*, found as h^((p-1)/q)
/// for seeded candidates h until the power is not 1.
std::uint64_t find_subgroup_element(std::uint64_t p, std::uint64_t q, std::uint64_t seed);

/// generate_prime_pair + find_subgroup_element.
FieldParams make_field_params(std::uint64_t q_min, std::uint64_t seed);

/// Exact invariant check: p, q prime, q | p-1, a != 1, a^q = 1 mod p.
bool check_field_params(const FieldParams& fp);

} // namespace expid
