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

#include "shuffledp/bib.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "shuffledp/errors.h"
#include "shuffledp/parallel.h"

namespace shuffledp {
namespace {

std::vector<std::uint64_t> ValidatedSet(const BIBParams& params,
                                        std::span<const std::uint64_t> set,
                                        const char* name) {
  if (set.size() != params.s) {
    throw InvalidInputError(std::string(name) + " must contain exactly s=" +
                            std::to_string(params.s) + " bins (got " +
                            std::to_string(set.size()) + ")");
  }
  std::vector<std::uint64_t> sorted(set.begin(), set.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidInputError(std::string(name) + " contains a repeated bin");
  }
  if (!sorted.empty() && (sorted.front() < 1 || sorted.back() > params.m)) {
    throw InvalidInputError(std::string(name) + " must be a subset of [1, m]");
  }
  return sorted;
}

std::uint64_t DrawBinomial(Rng& rng, std::uint64_t trials, double p) {
  if (trials == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return trials;
  return std::binomial_distribution<std::uint64_t>(trials, p)(rng);
}

// Probability mass of Bin(trials, p), evaluated in log space.
std::vector<double> BinomialPmf(std::uint64_t trials, double p) {
  std::vector<double> pmf(trials + 1, 0.0);
  if (p <= 0.0) {
    pmf[0] = 1.0;
    return pmf;
  }
  if (p >= 1.0) {
    pmf[trials] = 1.0;
    return pmf;
  }
  const double n = static_cast<double>(trials);
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const double log_n_fact = std::lgamma(n + 1.0);
  for (std::uint64_t j = 0; j <= trials; ++j) {
    const double x = static_cast<double>(j);
    const double log_mass = log_n_fact - std::lgamma(x + 1.0) -
                            std::lgamma(n - x + 1.0) + x * log_p +
                            (n - x) * log_q;
    pmf[j] = std::exp(log_mass);
  }
  return pmf;
}

std::vector<double> Convolve(const std::vector<double>& a,
                             const std::vector<double>& b) {
  std::vector<long double> acc(a.size() + b.size() - 1, 0.0L);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      acc[i + j] += static_cast<long double>(a[i]) * b[j];
    }
  }
  return std::vector<double>(acc.begin(), acc.end());
}

// Smallest x1 >= 0 with RatioFails(1 + x1, x2, epsilon), x2 >= 1.
std::uint64_t FailureThreshold(std::uint64_t x2, double epsilon) {
  const double guess = std::ceil(std::exp(epsilon) * static_cast<double>(x2)) - 2.0;
  std::uint64_t t = guess > 0.0 ? static_cast<std::uint64_t>(guess) : 0;
  while (!RatioFails(1 + t, x2, epsilon)) ++t;
  while (t > 0 && RatioFails(t, x2, epsilon)) --t;
  return t;
}

PrivacyAuditReport MonteCarloReport(std::span<const std::uint8_t> failures,
                                    const BIBParams& params, double epsilon,
                                    double delta) {
  std::uint64_t failed = 0;
  for (std::uint8_t f : failures) failed += f;
  const double trials = static_cast<double>(failures.size());
  const double rate = trials > 0 ? static_cast<double>(failed) / trials : 0.0;
  PrivacyAuditReport report;
  report.mode = AuditMode::kMonteCarlo;
  report.epsilon = epsilon;
  report.failure_probability = rate;
  report.delta_bound = delta;
  report.condition_holds = CheckPrivacyCondition(params, epsilon, delta);
  report.trials = failures.size();
  report.standard_error =
      trials > 0 ? std::sqrt(rate * (1.0 - rate) / trials) : 0.0;
  return report;
}

void CheckEpsilon(double epsilon) {
  if (!(epsilon > 0.0)) {
    throw InvalidParameterError("epsilon must be > 0");
  }
}

}  // namespace

std::string_view AuditModeName(AuditMode mode) {
  return mode == AuditMode::kExact ? "exact" : "monte-carlo";
}

std::uint64_t BinLoadVector::total() const {
  std::uint64_t sum = 0;
  for (std::uint64_t w : loads) sum += w;
  return sum;
}

BallsIntoBins::BallsIntoBins(const BIBParams& params,
                             std::span<const std::uint64_t> special)
    : params_(params) {
  ValidateBIBParams(params);
  special_ = ValidatedSet(params, special, "S");
}

std::vector<std::uint64_t> BallsIntoBins::Sample(Rng& rng) const {
  std::vector<std::uint64_t> balls;
  const std::uint64_t coins = DrawBinomial(rng, params_.n, params_.p);
  balls.reserve(1 + params_.k + coins);
  balls.push_back(special_[UniformInt(rng, 0, special_.size() - 1)]);
  for (std::uint64_t i = 0; i < params_.k + coins; ++i) {
    balls.push_back(UniformInt(rng, 1, params_.m));
  }
  return balls;
}

std::vector<std::uint64_t> BIBMechanism(const BIBParams& params,
                                        std::span<const std::uint64_t> special,
                                        Rng& rng) {
  return BallsIntoBins(params, special).Sample(rng);
}

BinLoadVector ToLoads(std::span<const std::uint64_t> balls, std::uint64_t m) {
  BinLoadVector out;
  out.loads.assign(m, 0);
  for (std::uint64_t bin : balls) {
    if (bin < 1 || bin > m) throw InvalidInputError("ball outside [1, m]");
    ++out.loads[bin - 1];
  }
  return out;
}

bool CheckPrivacyCondition(const BIBParams& params, double epsilon,
                           double delta) {
  ValidateBIBParams(params);
  if (!(epsilon > 0.0 && epsilon <= kMaxEpsilon)) {
    throw InvalidParameterError("epsilon must satisfy 0 < epsilon <= 3");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidParameterError("delta must satisfy 0 < delta < 1");
  }
  const double noise = static_cast<double>(params.k) +
                       static_cast<double>(params.n) * params.p;
  const double required = 32.0 * std::log(2.0 / delta) / (epsilon * epsilon) *
                          static_cast<double>(params.m) /
                          static_cast<double>(params.s);
  return noise >= required;
}

bool RatioFails(std::uint64_t numerator, std::uint64_t denominator,
                double epsilon) {
  if (denominator == 0) return true;
  return std::log(static_cast<double>(numerator) /
                  static_cast<double>(denominator)) >= epsilon;
}

double ExactPrivacyFailure(const BIBParams& params, double epsilon) {
  ValidateBIBParams(params);
  CheckEpsilon(epsilon);
  if (params.k + params.n > kExactModeCap) {
    throw SizeLimitError("exact mode supports k + n <= " +
                         std::to_string(kExactModeCap) + " (got " +
                         std::to_string(params.k + params.n) +
                         "); use monte-carlo mode");
  }
  const double special_fraction =
      static_cast<double>(params.s) / static_cast<double>(params.m);
  const std::vector<double> pmf =
      Convolve(BinomialPmf(params.k, special_fraction),
               BinomialPmf(params.n, params.p * special_fraction));

  // tail[j] = Pr[X >= j].
  std::vector<long double> tail(pmf.size() + 1, 0.0L);
  for (std::size_t j = pmf.size(); j-- > 0;) tail[j] = tail[j + 1] + pmf[j];

  long double failure = pmf[0];  // X2 = 0
  for (std::size_t x2 = 1; x2 < pmf.size(); ++x2) {
    if (pmf[x2] == 0.0) continue;
    const std::uint64_t t = FailureThreshold(x2, epsilon);
    if (t < pmf.size()) failure += static_cast<long double>(pmf[x2]) * tail[t];
  }
  return std::clamp(static_cast<double>(failure), 0.0, 1.0);
}

PrivacyAuditReport ExactPrivacyAudit(const BIBParams& params, double epsilon,
                                     double delta) {
  PrivacyAuditReport report;
  report.mode = AuditMode::kExact;
  report.epsilon = epsilon;
  report.condition_holds = CheckPrivacyCondition(params, epsilon, delta);
  report.failure_probability = ExactPrivacyFailure(params, epsilon);
  report.delta_bound = delta;
  return report;
}

PrivacyAuditReport MonteCarloPrivacyLoss(const BIBParams& params,
                                         std::span<const std::uint64_t> special,
                                         std::span<const std::uint64_t> neighbor,
                                         double epsilon, double delta,
                                         std::uint64_t trials,
                                         std::uint64_t seed, int threads) {
  ValidateBIBParams(params);
  CheckEpsilon(epsilon);
  if (trials < 1) throw InvalidParameterError("trials must be >= 1");
  const std::vector<std::uint64_t> s_bins = ValidatedSet(params, special, "S");
  const std::vector<std::uint64_t> s_prime = ValidatedSet(params, neighbor, "S'");
  if (params.m > (std::uint64_t{1} << 32)) {
    throw SizeLimitError("monte-carlo mode supports m <= 2^32");
  }
  // bit 0: bin in S, bit 1: bin in S'.
  std::vector<std::uint8_t> membership(params.m + 1, 0);
  for (std::uint64_t bin : s_bins) membership[bin] |= 1;
  for (std::uint64_t bin : s_prime) membership[bin] |= 2;

  std::vector<std::uint8_t> failures(trials, 0);
  ParallelFor(trials, threads, [&](std::size_t t) {
    Rng rng = Substream(seed, t);
    const std::uint64_t real = s_bins[UniformInt(rng, 0, s_bins.size() - 1)];
    std::uint64_t in_s = 1;
    std::uint64_t in_s_prime = (membership[real] >> 1) & 1;
    const std::uint64_t noisy = params.k + DrawBinomial(rng, params.n, params.p);
    std::uniform_int_distribution<std::uint64_t> bin(1, params.m);
    for (std::uint64_t i = 0; i < noisy; ++i) {
      const std::uint8_t flags = membership[bin(rng)];
      in_s += flags & 1;
      in_s_prime += (flags >> 1) & 1;
    }
    failures[t] = RatioFails(in_s, in_s_prime, epsilon) ? 1 : 0;
  });
  return MonteCarloReport(failures, params, epsilon, delta);
}

PrivacyAuditReport MonteCarloInequality(const BIBParams& params, double epsilon,
                                        double delta, std::uint64_t trials,
                                        std::uint64_t seed, int threads) {
  ValidateBIBParams(params);
  CheckEpsilon(epsilon);
  if (trials < 1) throw InvalidParameterError("trials must be >= 1");
  const double fraction =
      static_cast<double>(params.s) / static_cast<double>(params.m);
  std::vector<std::uint8_t> failures(trials, 0);
  ParallelFor(trials, threads, [&](std::size_t t) {
    Rng rng = Substream(seed, t);
    const std::uint64_t x1 = DrawBinomial(rng, params.k, fraction) +
                             DrawBinomial(rng, params.n, params.p * fraction);
    const std::uint64_t x2 = DrawBinomial(rng, params.k, fraction) +
                             DrawBinomial(rng, params.n, params.p * fraction);
    failures[t] = RatioFails(1 + x1, x2, epsilon) ? 1 : 0;
  });
  return MonteCarloReport(failures, params, epsilon, delta);
}

}  // namespace shuffledp
