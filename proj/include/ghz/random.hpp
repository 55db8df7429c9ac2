#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ghz {

/// Caller-owned random stream. The engine is fully specified by the standard;
/// all draws below are hand-rolled so results do not depend on the standard
/// library's distribution implementations.
using RandomStream = std::mt19937_64;

/// Derives an independent stream from a master seed and a key path, e.g.
/// (seed, sweep_index, trial_index).
RandomStream derive_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(RandomStream& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// True with probability `prob`; prob <= 0 never fires, prob >= 1 always does.
inline bool bernoulli(RandomStream& rng, double prob) { return uniform01(rng) < prob; }

/// Unbiased integer in [0, bound). bound must be > 0.
std::uint64_t uniform_below(RandomStream& rng, std::uint64_t bound);

}  // namespace ghz
