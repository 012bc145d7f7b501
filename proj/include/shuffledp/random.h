// Copyright 2026 The shuffledp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SHUFFLEDP_RANDOM_H_
#define SHUFFLEDP_RANDOM_H_

#include <cstdint>
#include <random>

namespace shuffledp {

using Rng = std::mt19937_64;

// Seed used by every entry point when the caller does not supply one.
inline constexpr std::uint64_t kDefaultSeed = 0x5eed5eed2024ULL;

// SplitMix64 finalizer.
constexpr std::uint64_t MixSeed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed of substream `index` under `parent`. Substreams of the same parent
// are derived independently of one another, so work split by index over any
// number of threads consumes exactly the same randomness.
constexpr std::uint64_t DeriveSeed(std::uint64_t parent, std::uint64_t index) {
  return MixSeed(MixSeed(parent) ^ MixSeed(index + 0x632be59bd9b4e019ULL));
}

inline Rng Substream(std::uint64_t parent, std::uint64_t index) {
  return Rng(DeriveSeed(parent, index));
}

// Reserved substream indices. User substreams use indices [0, n).
inline constexpr std::uint64_t kShuffleStream = ~0ULL;
inline constexpr std::uint64_t kDatasetStream = ~0ULL - 1;

inline bool Bernoulli(Rng& rng, double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return std::bernoulli_distribution(p)(rng);
}

// Uniform integer in [lo, hi].
inline std::uint64_t UniformInt(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
}

}  // namespace shuffledp

#endif  // SHUFFLEDP_RANDOM_H_
