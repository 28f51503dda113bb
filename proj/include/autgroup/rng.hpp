#pragma once

#include <cstdint>
#include <random>

namespace autgroup {

/// std::mt19937_64 has a standard-mandated output sequence, so seeded runs
/// reproduce bit for bit on every conforming implementation. Distributions
/// from <random> do not share that guarantee; use uniform_below instead.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Seed of trial `index` in a run seeded with `seed`:
///   mix64(seed ^ mix64(index))
/// Trials depend only on (seed, index), never on scheduling.
constexpr std::uint64_t trial_seed(std::uint64_t seed,
                                   std::uint64_t index) noexcept {
  return mix64(seed ^ mix64(index));
}

inline Rng trial_rng(std::uint64_t seed, std::uint64_t index) {
  return Rng(trial_seed(seed, index));
}

/// Exactly uniform integer in [0, bound) by rejection. bound > 0.
inline std::uint64_t uniform_below(Rng &rng, std::uint64_t bound) {
  std::uint64_t const threshold = (0 - bound) % bound;
  for (;;) {
    std::uint64_t const r = rng();
    if (r >= threshold)
      return r % bound;
  }
}

} // namespace autgroup
