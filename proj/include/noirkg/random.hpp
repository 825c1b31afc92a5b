#pragma once

#include <cstdint>
#include <random>

namespace noirkg {

using Rng = std::mt19937_64;

// Independent stream for item `index` of a run seeded with `seed`, so
// per-item results do not depend on processing order.
inline Rng stream_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

}  // namespace noirkg
