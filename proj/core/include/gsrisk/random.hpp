#pragma once

#include <cstdint>
#include <random>

namespace gsrisk {

using Rng = std::mt19937_64;

/// Well-known stream identifiers below the replication range. Replication r
/// of an estimator uses stream r; auxiliary procedures use the high range.
namespace streams {
inline constexpr std::uint64_t kAdamPilot = 0xAD00'0000'0000ULL;
}  // namespace streams

/// Builds an independent generator for (master_seed, stream, substream).
/// The mapping is fixed, so a master seed fully determines every stream.
Rng make_stream(std::uint64_t master_seed, std::uint64_t stream, std::uint64_t substream = 0);

/// Uniform double in [0, 1).
inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// Uniform integer in [lo, hi].
inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace gsrisk
