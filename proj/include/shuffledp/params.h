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

#ifndef SHUFFLEDP_PARAMS_H_
#define SHUFFLEDP_PARAMS_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace shuffledp {

// Which frequency-estimation protocol an FEParams record configures.
// FE0 sends the raw element plus probabilistic blanket noise, FE1 sends a
// hashed triple (u, v, h_{u,v}(x)) plus blanket noise triples.
enum class Variant { kFE0, kFE1 };

std::string_view VariantName(Variant variant);
Variant ParseVariant(std::string_view name);

// Every derived constant of one frequency-estimation instance. Build these
// with DeriveFEParams(); the struct is an aggregate so tests can construct
// degenerate (for example noiseless) instances directly.
//
// Domain elements are 1-based: [B] = {1, ..., B}. For FE0, num_bins equals
// domain_size and prime / p_col are zero.
struct FEParams {
  Variant variant = Variant::kFE1;
  std::uint64_t num_users = 0;    // n
  std::uint64_t domain_size = 0;  // B
  std::uint64_t num_bins = 0;     // b
  std::uint64_t prime = 0;        // q, smallest prime >= B (FE1)
  double rho = 0.0;               // expected blanket noises per user
  double p_col = 0.0;             // hash collision probability (FE1)
  double epsilon = 1.0;
  double delta = 0.0;
  double gamma_robust = 1.0;      // honest-user fraction

  bool operator==(const FEParams&) const = default;
};

// Balls-into-bins mechanism constants. Bins are 1-based: [m] = {1, ..., m}.
struct BIBParams {
  std::uint64_t m = 1;  // bins
  std::uint64_t s = 1;  // special bins
  std::uint64_t k = 0;  // fixed noisy balls
  std::uint64_t n = 0;  // coins
  double p = 0.0;       // coin bias

  bool operator==(const BIBParams&) const = default;
};

// Throws InvalidParameterError unless 1 <= s <= m and 0 <= p <= 1.
void ValidateBIBParams(const BIBParams& params);

// One layer of the heavy-hitter prefix tree. Layer l estimates frequencies of
// the length-l prefixes, i.e. a domain of 2^l elements.
struct HHDLayer {
  int level = 1;
  double epsilon = 0.0;
  double delta = 0.0;
  FEParams fe;

  bool operator==(const HHDLayer&) const = default;
};

struct HHDParams {
  std::uint64_t num_users = 0;    // n
  std::uint64_t domain_size = 0;  // B, a power of two
  std::uint64_t num_bins = 0;     // b, shared by the FE1 layers
  double epsilon = 1.0;
  double delta = 0.0;
  double gamma_robust = 1.0;
  double phi = 0.0;               // heavy-hitter threshold fraction
  double gamma_hh = 0.1;          // per-heavy-hitter failure probability
  double c_sub = 16.0;            // subsampling constant
  double q_sub = 1.0;             // per-tuple forwarding probability, layers < L
  bool q_sub_clamped = false;     // true when the formula exceeded 1
  double prune_threshold = 0.0;   // Delta, in subsampled units
  double report_threshold = 0.0;  // tau
  int levels = 0;                 // L = log2 B
  std::vector<HHDLayer> layers;   // layers[l - 1] is layer l
  std::vector<std::string> warnings;

  const HHDLayer& layer(int level) const { return layers.at(level - 1); }
  bool operator==(const HHDParams&) const = default;
};

inline constexpr double kMaxEpsilon = 3.0;
inline constexpr double kDefaultSubsamplingConstant = 16.0;

// Smallest prime q >= value. Throws InvalidParameterError for value < 2.
// The result always satisfies q < 2 * value.
std::uint64_t SmallestPrimeGeq(std::uint64_t value);

bool IsPrime(std::uint64_t value);

// 32 ln(2/delta) / (gamma_robust * epsilon^2) * (domain_or_bins / n).
double BlanketNoiseRate(std::uint64_t num_users, std::uint64_t domain_or_bins,
                        double epsilon, double delta, double gamma_robust = 1.0);

// Collision probability of h_{u,v}(x) = ((ux + v) mod q) mod b over uniform
// (u, v) in [q-1] x Z_q. It is the same for every pair x != y:
//   floor(q/b) * ((q mod b) + q - b) / (q (q - 1)).
double CollisionProbability(std::uint64_t prime, std::uint64_t num_bins);

// Builds a validated parameter record. For FE0 `num_bins` is ignored and rho
// is computed over the domain; rho > 1 raises ConfigurationError. For FE1,
// 2 <= b <= B/2 is required.
FEParams DeriveFEParams(Variant variant, std::uint64_t num_users,
                        std::uint64_t domain_size, std::uint64_t num_bins,
                        double epsilon, double delta,
                        double gamma_robust = 1.0);

// Default bin count max(2, floor(n / ln^2 n)).
std::uint64_t DefaultNumBins(std::uint64_t num_users);

// Error bound alpha such that the protocol is (alpha, beta)-accurate:
//   FE0: max{3 ln(2B/beta), sqrt(3 ln(2B/beta) * N)}
//   FE1: 2 max{3 ln(2B/beta), sqrt(3 ln(2B/beta) * (n/b + N))}
// with N = 32 ln(2/delta) / (gamma_robust * epsilon^2).
double ErrorBoundAlpha(const FEParams& params, double beta);

// Heavy-hitter constants:
//   q_sub = min(1, c_sub / (phi n) * ln(B / gamma_hh)),
//   Delta = q_sub / 2 * phi n,  tau = phi n,
//   (eps_L, delta_L) = (eps/2, delta/2), (eps_l, delta_l) = (eps, delta)/(2L).
// Layers with 2^l >= 2b run FE1 with prime smallest_prime_geq(2^l); smaller
// layers run FE0 directly on the prefix.
HHDParams DeriveHHDParams(std::uint64_t num_users, std::uint64_t domain_size,
                          std::uint64_t num_bins, double epsilon, double delta,
                          double phi, double gamma_hh,
                          double c_sub = kDefaultSubsamplingConstant,
                          double gamma_robust = 1.0);

}  // namespace shuffledp

#endif  // SHUFFLEDP_PARAMS_H_
