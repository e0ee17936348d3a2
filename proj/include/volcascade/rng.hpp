#pragma once

#include <cstdint>
#include <random>

namespace volcascade {

/// splitmix64 step; used to derive well-separated seed material.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Deterministic per-stream generator. Streams derived from the same root
/// seed but different stream ids are independent for practical purposes,
/// so ensembles can be filled in parallel with reproducible output.
inline std::mt19937_64 make_stream(std::uint64_t root_seed, std::uint64_t stream_id) {
    std::uint64_t s = root_seed ^ (0xA0761D6478BD642FULL * (stream_id + 1));
    const std::uint64_t a = splitmix64(s);
    const std::uint64_t b = splitmix64(s);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return std::mt19937_64(seq);
}

/// Stable 64-bit seed for a named pipeline stage.
std::uint64_t stage_seed(std::uint64_t root_seed, const char* stage_name);

}  // namespace volcascade
