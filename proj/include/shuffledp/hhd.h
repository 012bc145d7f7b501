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

#ifndef SHUFFLEDP_HHD_H_
#define SHUFFLEDP_HHD_H_

#include <compare>
#include <cstdint>
#include <vector>

#include "shuffledp/fe.h"
#include "shuffledp/message_bag.h"
#include "shuffledp/params.h"
#include "shuffledp/random.h"

namespace shuffledp {

// Elements in this module are 0-based: x in [0, B).

// One forwarded layer tuple (l, f, r). For an FE1 layer f = (u, v) and r is
// the hash bin; for an FE0 layer f is empty (u = v = 0) and r is the FE0
// value, i.e. the prefix plus one.
struct HHDMessage {
  std::uint32_t layer = 1;
  Variant encoding = Variant::kFE1;
  std::uint64_t u = 0;
  std::uint64_t v = 0;
  std::uint64_t r = 0;
  auto operator<=>(const HHDMessage&) const = default;
};

using HHDBag = MessageBag<HHDMessage>;

struct CandidateSet {
  int layer = 0;
  std::vector<std::uint64_t> prefixes;  // ascending, values in [0, 2^layer)
  bool operator==(const CandidateSet&) const = default;
};

struct HHDResult {
  std::vector<std::uint64_t> heavy;      // S, ascending
  std::vector<CandidateSet> candidates;  // C_1 .. C_{L-1}
};

// floor(x / 2^(levels - length)). Requires x < 2^levels, 1 <= length <= levels.
std::uint64_t Prefix(std::uint64_t x, int length, int levels);

// Runs each layer randomizer on prefix(x, l); tuples of layers l < L are
// forwarded with probability q_sub, the final layer is always forwarded.
std::vector<HHDMessage> RandomizeHHD(std::uint64_t x, const HHDParams& params,
                                     Rng& rng);

// (1 + rho_L) + q_sub * sum_{l < L} (1 + rho_l).
double ExpectedHHDMessagesPerUser(const HHDParams& params);

// Layer-l estimate of prefix c in the units of the forwarded sub-bag:
// full frequency for l = L, q_sub times the frequency for l < L.
double LayerEstimate(std::span<const HHDMessage> layer_messages,
                     const HHDParams& params, int level, std::uint64_t prefix);

// Prefix-tree analyzer. Candidates of layers 1..L-1 are pruned when their
// subsampled estimate is below Delta; children of C_{L-1} are reported when
// their final-layer estimate reaches tau.
HHDResult RunHHDAnalyzer(const HHDBag& bag, const HHDParams& params);

std::vector<std::uint64_t> AnalyzeHHD(const HHDBag& bag, const HHDParams& params);
std::vector<CandidateSet> HHDCandidateTrace(const HHDBag& bag,
                                            const HHDParams& params);

}  // namespace shuffledp

#endif  // SHUFFLEDP_HHD_H_
