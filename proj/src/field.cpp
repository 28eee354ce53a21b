#include "expid/field.hpp"

#include "expid/rng.hpp"

namespace expid {

std::uint64_t mod_mul(std::uint64_t x, std::uint64_t y, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(x) * y) % m);
}

std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exponent, std::uint64_t m) {
    std::uint64_t result = 1 % m;
    std::uint64_t acc = base % m;
    while (exponent != 0) {
        if (exponent & 1) {
            result = mod_mul(result, acc, m);
        }
        acc = mod_mul(acc, acc, m);
        exponent >>= 1;
    }
    return result;
}

std::uint64_t mod_inv(std::uint64_t x, std::uint64_t m) {
    x %= m;
    if (x == 0) {
        throw ZeroInverse("mod_inv: zero has no inverse mod " + std::to_string(m));
    }
    return mod_pow(x, m - 2, m); // m prime
}

namespace {

bool miller_rabin_witness(std::uint64_t n, std::uint64_t witness, std::uint64_t d, unsigned s) {
    const std::uint64_t a = witness % n;
    if (a == 0) {
        return true; // witness collides with n, no information
    }
    std::uint64_t x = mod_pow(a, d, n);
    if (x == 1 || x == n - 1) {
        return true;
    }
    for (unsigned i = 1; i < s; ++i) {
        x = mod_mul(x, x, n);
        if (x == n - 1) {
            return true;
        }
    }
    return false;
}

} // namespace

bool is_prime(std::uint64_t n) {
    if (n < 2) {
        return false;
    }
    for (std::uint64_t small : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n == small) {
            return true;
        }
        if (n % small == 0) {
            return false;
        }
    }
    std::uint64_t d = n - 1;
    unsigned s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // This witness set is exact for every n < 2^64.
    for (std::uint64_t w : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (!miller_rabin_witness(n, w, d, s)) {
            return false;
        }
    }
    return true;
}

std::uint64_t next_prime_at_least(std::uint64_t n) {
    if (n < 2) {
        n = 2;
    }
    for (std::uint64_t c = n; c <= kMaxModulus; ++c) {
        if (is_prime(c)) {
            return c;
        }
    }
    throw SearchExhausted("next_prime_at_least: no prime below the 2^62 modulus cap");
}

PrimePair generate_prime_pair(std::uint64_t q_min) {
    if (q_min < 3) {
        throw PreconditionViolation("generate_prime_pair: q_min must be >= 3");
    }
    const std::uint64_t q = next_prime_at_least(q_min);
    for (std::uint64_t m = 1;; ++m) {
        const unsigned __int128 candidate = static_cast<unsigned __int128>(m) * q + 1;
        if (candidate > kMaxModulus) {
            throw SearchExhausted("generate_prime_pair: no p = m*q + 1 below the 2^62 cap");
        }
        const std::uint64_t p = static_cast<std::uint64_t>(candidate);
        if (is_prime(p)) {
            return PrimePair{q, p};
        }
    }
}

std::uint64_t find_subgroup_element(std::uint64_t p, std::uint64_t q, std::uint64_t seed) {
    if (q == 0 || (p - 1) % q != 0) {
        throw PreconditionViolation("find_subgroup_element: q must divide p - 1");
    }
    const std::uint64_t exponent = (p - 1) / q;
    Rng rng(seed, 0x737562677270ULL);
    for (;;) {
        const std::uint64_t h = rng.in_range(2, p - 1);
        const std::uint64_t a = mod_pow(h, exponent, p);
        if (a != 1) {
            return a;
        }
    }
}

FieldParams make_field_params(std::uint64_t q_min, std::uint64_t seed) {
    const PrimePair pair = generate_prime_pair(q_min);
    const std::uint64_t a = find_subgroup_element(pair.p, pair.q, seed);
    return FieldParams{pair.p, pair.q, a};
}

bool check_field_params(const FieldParams& fp) {
    if (fp.p > kMaxModulus || fp.q > kMaxModulus) {
        return false;
    }
    if (!is_prime(fp.p) || !is_prime(fp.q)) {
        return false;
    }
    if ((fp.p - 1) % fp.q != 0) {
        return false;
    }
    if (fp.a <= 1 || fp.a >= fp.p) {
        return false;
    }
    return mod_pow(fp.a, fp.q, fp.p) == 1;
}

} // namespace expid
