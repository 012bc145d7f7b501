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

#ifndef SHUFFLEDP_BIB_H_
#define SHUFFLEDP_BIB_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "shuffledp/params.h"
#include "shuffledp/random.h"

namespace shuffledp {

// Balls in each bin; loads[i] is bin i + 1.
struct BinLoadVector {
  std::vector<std::uint64_t> loads;
  std::uint64_t total() const;
  bool operator==(const BinLoadVector&) const = default;
};

enum class AuditMode { kExact, kMonteCarlo };
std::string_view AuditModeName(AuditMode mode);

struct PrivacyAuditReport {
  AuditMode mode = AuditMode::kExact;
  double epsilon = 0.0;
  double failure_probability = 0.0;
  double delta_bound = 0.0;
  bool condition_holds = false;  // k + np >= 32 ln(2/delta)/eps^2 * m/s
  std::optional<std::uint64_t> trials;
  std::optional<double> standard_error;

  bool operator==(const PrivacyAuditReport&) const = default;
};

// Largest k + n accepted by ExactPrivacyFailure.
inline constexpr std::uint64_t kExactModeCap = 10000;

// Samples M^BIB with a validated special-bin set. The set is checked once on
// construction, so repeated sampling stays cheap.
class BallsIntoBins {
 public:
  // Throws InvalidInputError unless `special` holds exactly s distinct bins
  // of [m].
  BallsIntoBins(const BIBParams& params, std::span<const std::uint64_t> special);

  // One real ball uniform over S, k uniform noisy balls, then Bin(n, p)
  // further uniform noisy balls. Real ball first.
  std::vector<std::uint64_t> Sample(Rng& rng) const;

  const BIBParams& params() const { return params_; }
  std::span<const std::uint64_t> special() const { return special_; }

 private:
  BIBParams params_;
  std::vector<std::uint64_t> special_;
};

// Multiset of bin indices (1-based) produced by one run of M^BIB.
std::vector<std::uint64_t> BIBMechanism(const BIBParams& params,
                                        std::span<const std::uint64_t> special,
                                        Rng& rng);

BinLoadVector ToLoads(std::span<const std::uint64_t> balls, std::uint64_t m);

// k + n p >= 32 ln(2/delta) / epsilon^2 * m / s.
bool CheckPrivacyCondition(const BIBParams& params, double epsilon,
                           double delta);

// Pr[(1 + X1) / X2 >= e^epsilon] for independent X1, X2 distributed as
// Bin(k, s/m) + Bin(n, p s/m), computed by exact convolution. X2 = 0 counts
// as a failure. Throws SizeLimitError when k + n > kExactModeCap.
double ExactPrivacyFailure(const BIBParams& params, double epsilon);

PrivacyAuditReport ExactPrivacyAudit(const BIBParams& params, double epsilon,
                                     double delta);

// Samples W ~ M(S) and evaluates the likelihood ratio
//   Pr[M(S) = W] / Pr[M(S') = W] = sum_{i in S} w_i / sum_{i in S'} w_i
// for `trials` independent draws; the failure frequency estimates the
// probability that the ratio reaches e^epsilon. Trial t draws from substream
// t of `seed`, so the report does not depend on `threads`.
PrivacyAuditReport MonteCarloPrivacyLoss(const BIBParams& params,
                                         std::span<const std::uint64_t> special,
                                         std::span<const std::uint64_t> neighbor,
                                         double epsilon, double delta,
                                         std::uint64_t trials,
                                         std::uint64_t seed, int threads = 1);

// Monte Carlo estimate of the same quantity ExactPrivacyFailure computes
// (independent X1, X2), for cross-checking the exact mode.
PrivacyAuditReport MonteCarloInequality(const BIBParams& params, double epsilon,
                                        double delta, std::uint64_t trials,
                                        std::uint64_t seed, int threads = 1);

// The likelihood-ratio failure predicate shared by every audit:
// denominator == 0 or numerator / denominator >= e^epsilon.
bool RatioFails(std::uint64_t numerator, std::uint64_t denominator,
                double epsilon);

}  // namespace shuffledp

#endif  // SHUFFLEDP_BIB_H_
