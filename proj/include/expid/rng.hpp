#pragma once

#include <cstdint>

namespace expid {

/// Deterministic 64-bit generator (splitmix64). A stream constructed from
/// (seed, stream_id) is independent of streams with other ids, so Monte Carlo
/// trials indexed by trial number can run in any order, or concurrently, and
/// still replay byte-for-byte.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(mix(seed + kGamma)) {}

    Rng(std::uint64_t seed, std::uint64_t stream_id)
        : state_(mix(mix(seed + kGamma) ^ mix(stream_id + 0x6a09e667f3bcc909ULL))) {}

    std::uint64_t next() {
        state_ += kGamma;
        return mix(state_);
    }

    /// Uniform draw from {0, ..., bound-1} by rejection; bound must be >= 1.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t rem = (0 - bound) % bound; // 2^64 mod bound
        if (rem == 0) {
            return next() % bound;
        }
        const std::uint64_t limit = 0 - rem; // largest multiple of bound
        std::uint64_t x = next();
        while (x >= limit) {
            x = next();
        }
        return x % bound;
    }

    /// Uniform draw from {lo, ..., hi} inclusive.
    std::uint64_t in_range(std::uint64_t lo, std::uint64_t hi) {
        return lo + below(hi - lo + 1);
    }

private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

} // namespace expid
