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

#ifndef SHUFFLEDP_FE_H_
#define SHUFFLEDP_FE_H_

#include <compare>
#include <cstdint>
#include <vector>

#include "shuffledp/message_bag.h"
#include "shuffledp/params.h"
#include "shuffledp/random.h"

namespace shuffledp {

using Element = std::uint64_t;

struct FE0Message {
  Element value = 1;  // in [1, B]
  auto operator<=>(const FE0Message&) const = default;
};

struct FE1Message {
  std::uint64_t u = 1;  // in [1, q-1]
  std::uint64_t v = 0;  // in [0, q-1]
  std::uint64_t w = 0;  // in [0, b-1]
  auto operator<=>(const FE1Message&) const = default;
};

using FE0Bag = MessageBag<FE0Message>;
using FE1Bag = MessageBag<FE1Message>;

struct FrequencyEstimate {
  Element element = 0;
  double g_hat = 0.0;  // unbiased, never clamped
  bool operator==(const FrequencyEstimate&) const = default;
};

// --- FE0: small domain -----------------------------------------------------

// The user's element followed, with probability rho, by one uniform blanket
// noise. Throws ConfigurationError when rho > 1.
std::vector<FE0Message> RandomizeFE0(Element x, const FEParams& params,
                                     Rng& rng);

// FE0 randomizer without the rho <= 1 restriction: floor(rho) noises plus one
// more with probability rho - floor(rho). Used by heavy-hitter layers whose
// per-layer budget pushes rho above 1.
std::vector<FE0Message> RandomizeFE0Lifted(Element x, const FEParams& params,
                                           Rng& rng);

// X - sampling_rate * n rho / B, where X is the occurrence count of the
// element. sampling_rate < 1 corrects a bag whose tuples were each forwarded
// with that probability; the estimate is then in subsampled units.
double FE0Estimate(std::uint64_t count, const FEParams& params,
                   double sampling_rate = 1.0);

FrequencyEstimate AnalyzeFE0(const FE0Bag& bag, const FEParams& params,
                             Element x);
// Estimates for every element of [B] in one pass; index i holds element i+1.
std::vector<FrequencyEstimate> AnalyzeFE0All(const FE0Bag& bag,
                                             const FEParams& params);

// --- FE1: hashed large domain ----------------------------------------------

// ((u x + v) mod q) mod b.
std::uint64_t HashEval(std::uint64_t u, std::uint64_t v, Element x,
                       std::uint64_t q, std::uint64_t b);

// Real triple (u, v, h_{u,v}(x)) first, then floor(rho) uniform noise triples
// and one more with probability rho - floor(rho).
std::vector<FE1Message> RandomizeFE1(Element x, const FEParams& params,
                                     Rng& rng);

// (X - rate * (n rho / b + n p_col)) / (1 - p_col).
double FE1Estimate(std::uint64_t count, const FEParams& params,
                   double sampling_rate = 1.0);

// Number of triples in the bag with h_{u,v}(x) = w.
std::uint64_t CountFE1Matches(const FE1Bag& bag, const FEParams& params,
                              Element x);

FrequencyEstimate AnalyzeFE1Single(const FE1Bag& bag, const FEParams& params,
                                   Element x);

// {x in [B] : h_{u,v}(x) = w}, ascending. Computed from the residues
// r = w + i b < q as x = u^{-1} (r - v) mod q. Residue 0 stands for element
// q, kept only when B = q.
std::vector<Element> EnumeratePreimages(std::uint64_t u, std::uint64_t v,
                                        std::uint64_t w, std::uint64_t q,
                                        std::uint64_t b, std::uint64_t B);

// Matches AnalyzeFE1Single for every element bit for bit, but touches each
// triple once and only its ~q/b preimages. Index i holds element i+1.
std::vector<FrequencyEstimate> AnalyzeFE1All(const FE1Bag& bag,
                                             const FEParams& params);

// Inverse of u modulo prime q (extended Euclid).
std::uint64_t ModInverse(std::uint64_t u, std::uint64_t q);

// --- Privacy mapping onto the balls-into-bins mechanism ---------------------

// Noise part of the FE1 view after removing the other users' real outputs:
// M^BIB((q-1) q b, (q-1) q, n floor(rho), n, rho - floor(rho)).
BIBParams FE1NoiseMechanism(const FEParams& params);
// Noise part of the FE0 view: M^BIB(B, 1, 0, n, rho).
BIBParams FE0NoiseMechanism(const FEParams& params);

// Bin of triple (u, v, w) in the FE1 mapping, 1-based:
// 1 + ((u - 1) q + v) b + w.
std::uint64_t FE1TripleBin(const FE1Message& message, const FEParams& params);
// The (q-1) q bins {(u, v, h_{u,v}(x))} that a real output for x can land in,
// ascending.
std::vector<std::uint64_t> FE1SpecialBins(const FEParams& params, Element x);

}  // namespace shuffledp

#endif  // SHUFFLEDP_FE_H_
