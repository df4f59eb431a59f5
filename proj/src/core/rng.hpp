#pragma once

#include <cstdint>
#include <random>

namespace msense {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; decorrelates counter-derived seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Child seed number `counter` of `parent`. Stable across runs and thread schedules.
inline std::uint64_t child_seed(std::uint64_t parent, std::uint64_t counter) {
  return mix_seed(mix_seed(parent) ^ mix_seed(counter + 0x632BE59BD9B4E019ULL));
}

// Stream tags for per-drop sub-seeds.
namespace stream {
inline constexpr std::uint64_t kTargets = 1;
inline constexpr std::uint64_t kSymbols = 100;
inline constexpr std::uint64_t kNoise = 200;
}  // namespace stream

}  // namespace msense
