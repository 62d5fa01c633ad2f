#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace palab {

/// First output of a SplitMix64 generator whose state is `x`.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    std::uint64_t z = x + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seed of the `stream`-th independent replicate under `master_seed`.
constexpr std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t stream) noexcept {
    return splitmix64(master_seed ^ (stream * 0x9E3779B97F4A7C15ULL));
}

using Engine = std::mt19937_64;

// The standard distributions are implementation-defined; these are spelled
// out so streams are reproducible across standard libraries.

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Engine& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Exponential variate with the given rate (> 0).
inline double exponential(Engine& rng, double rate) {
    return -std::log1p(-uniform01(rng)) / rate;
}

}  // namespace palab
