#pragma once

#include <cstddef>
#include <cstdint>

namespace detox {

/// SplitMix64 (Steele, Lea & Flood 2014). Every seeded operation in the
/// library draws from this generator so results are reproducible by any
/// implementation that follows the same three steps:
///
///   state += 0x9E3779B97F4A7C15
///   z = (state ^ (state >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   return z ^ (z >> 31)
///
/// `uniform()` takes the top 53 bits; `below(n)` uses rejection sampling
/// on the raw 64-bit output to avoid modulo bias.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) noexcept {
        // Largest multiple of n that fits; values at or above it are redrawn.
        const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
        std::uint64_t x = next();
        while (x >= limit) x = next();
        return x % n;
    }

    std::size_t index_below(std::size_t n) noexcept {
        return static_cast<std::size_t>(below(static_cast<std::uint64_t>(n)));
    }

private:
    std::uint64_t state_;
};

}  // namespace detox
