#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace ltree {

using Rng = std::mt19937_64;

/// Independent generator for a sub-stream (trial index, grid index, ...)
/// of a run seed. Same inputs give the same stream on every thread.
inline Rng derive_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream) {
    std::vector<std::uint32_t> words{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    for (std::uint64_t s : stream) {
        words.push_back(static_cast<std::uint32_t>(s));
        words.push_back(static_cast<std::uint32_t>(s >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

} // namespace ltree
