#pragma once

#include <cstdint>
#include <random>

namespace srgg {

using Engine = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Independent engine for substream `stream` of master seed `seed`.
///
/// Substreams depend only on (seed, stream), so chunked Monte-Carlo work gives
/// the same draws whatever thread executes it.
inline Engine make_stream(std::uint64_t seed, std::uint64_t stream = 0) {
    const std::uint64_t a = splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
    const std::uint64_t b = splitmix64(a + stream);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return Engine(seq);
}

/// Uniform double in [0, 1) from the top 53 bits of one 64-bit draw.
///
/// Spelled out instead of std::uniform_real_distribution so the mapping is
/// identical across standard library implementations.
inline double uniform01(Engine& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Uniform double in (0, 1].
inline double uniform01_open_low(Engine& g) {
    return (static_cast<double>(g() >> 11) + 1.0) * 0x1.0p-53;
}

} // namespace srgg
