#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace packbench {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used only to derive well-separated stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Derives a child seed from a root seed and a key path, e.g.
/// derive_seed(seed, {generation, slot}). Different key paths give
/// independent streams; the same path always gives the same stream.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
    std::uint64_t h = splitmix64(seed);
    for (const auto k : keys) h = splitmix64(h ^ splitmix64(k + 0x632BE59BD9B4E019ULL));
    return h;
}

inline Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
    return Rng(derive_seed(seed, keys));
}

/// Uniform integer in [0, n). n must be positive.
inline int uniform_index(Rng& rng, int n) {
    return std::uniform_int_distribution<int>(0, n - 1)(rng);
}

inline bool bernoulli(Rng& rng, double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

// Stream tags, so that two subsystems sharing a root seed never alias.
namespace stream {
inline constexpr std::uint64_t kPool = 1;
inline constexpr std::uint64_t kEvolution = 2;
inline constexpr std::uint64_t kPolicy = 3;
inline constexpr std::uint64_t kPack = 4;
inline constexpr std::uint64_t kTask = 5;
}  // namespace stream

}  // namespace packbench
