#ifndef QUADMIX_SEEDING_HPP
#define QUADMIX_SEEDING_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace quadmix {

/// One run of the library is driven by a single 64-bit seed. Every operation
/// that consumes randomness derives its own stream seed by stable labeled
/// hashing, so pipelines stay reproducible when stages are added or reordered.

constexpr std::uint64_t mix_bits(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
    return mix_bits(seed ^ fnv1a(label));
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view label,
                                    std::uint64_t index) {
    return mix_bits(derive_seed(seed, label) + 0x9e3779b97f4a7c15ULL * (index + 1));
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// Uniform draw in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller. Two uniforms per draw, no state carried
/// between calls, which keeps streams position-independent.
inline double standard_normal(Rng& rng) {
    const double u1 = 1.0 - uniform01(rng);  // (0, 1]
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

/// Chunk size of the deterministic sampling contract: sample index i is drawn
/// from the stream seeded by (seed, i / kSampleChunk), so a parallel sampler
/// that splits on chunk boundaries reproduces the sequential output.
inline constexpr std::int64_t kSampleChunk = 65536;

}  // namespace quadmix

#endif  // QUADMIX_SEEDING_HPP
