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

#include "shuffledp/params.h"

#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "shuffledp/errors.h"

namespace shuffledp {
namespace {

[[noreturn]] void Fail(const std::string& message) {
  throw InvalidParameterError(message);
}

std::string Num(double value) {
  std::ostringstream out;
  out.precision(10);
  out << value;
  return out.str();
}

void CheckPrivacyBudget(double epsilon, double delta) {
  if (!(epsilon > 0.0 && epsilon <= kMaxEpsilon)) {
    Fail("epsilon must satisfy 0 < epsilon <= 3 (got " + Num(epsilon) + ")");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    Fail("delta must satisfy 0 < delta < 1 (got " + Num(delta) + ")");
  }
}

void CheckGammaRobust(double gamma_robust) {
  if (!(gamma_robust > 0.0 && gamma_robust <= 1.0)) {
    Fail("gamma_robust must satisfy 0 < gamma_robust <= 1 (got " +
         Num(gamma_robust) + ")");
  }
}

}  // namespace

std::string_view VariantName(Variant variant) {
  return variant == Variant::kFE0 ? "fe0" : "fe1";
}

Variant ParseVariant(std::string_view name) {
  if (name == "fe0" || name == "FE0") return Variant::kFE0;
  if (name == "fe1" || name == "FE1") return Variant::kFE1;
  Fail("variant must be fe0 or fe1 (got " + std::string(name) + ")");
}

void ValidateBIBParams(const BIBParams& params) {
  if (params.m < 1) Fail("m must be >= 1");
  if (params.s < 1 || params.s > params.m) {
    Fail("s must satisfy 1 <= s <= m (got s=" + std::to_string(params.s) +
         ", m=" + std::to_string(params.m) + ")");
  }
  if (!(params.p >= 0.0 && params.p <= 1.0)) {
    Fail("p must satisfy 0 <= p <= 1 (got " + Num(params.p) + ")");
  }
}

bool IsPrime(std::uint64_t value) {
  if (value < 2) return false;
  if (value % 2 == 0) return value == 2;
  for (std::uint64_t d = 3; d <= value / d; d += 2) {
    if (value % d == 0) return false;
  }
  return true;
}

std::uint64_t SmallestPrimeGeq(std::uint64_t value) {
  if (value < 2) Fail("B must be >= 2 to search for a prime (got " +
                      std::to_string(value) + ")");
  std::uint64_t q = value;
  while (!IsPrime(q)) ++q;
  // Bertrand's postulate.
  if (q >= 2 * value) {
    throw std::logic_error("prime search exceeded 2B for B=" +
                           std::to_string(value));
  }
  return q;
}

double BlanketNoiseRate(std::uint64_t num_users, std::uint64_t domain_or_bins,
                        double epsilon, double delta, double gamma_robust) {
  if (num_users < 1) Fail("n must be >= 1");
  CheckPrivacyBudget(epsilon, delta);
  CheckGammaRobust(gamma_robust);
  return 32.0 * std::log(2.0 / delta) / (gamma_robust * epsilon * epsilon) *
         (static_cast<double>(domain_or_bins) / static_cast<double>(num_users));
}

double CollisionProbability(std::uint64_t prime, std::uint64_t num_bins) {
  if (prime < 2) Fail("q must be >= 2 (got " + std::to_string(prime) + ")");
  if (num_bins < 1 || num_bins > prime) {
    Fail("b must satisfy 1 <= b <= q (got b=" + std::to_string(num_bins) +
         ", q=" + std::to_string(prime) + ")");
  }
  const std::uint64_t q = prime;
  const std::uint64_t b = num_bins;
  const unsigned __int128 colliding =
      static_cast<unsigned __int128>(q / b) * ((q % b) + q - b);
  const unsigned __int128 total = static_cast<unsigned __int128>(q) * (q - 1);
  return static_cast<double>(colliding) / static_cast<double>(total);
}

std::uint64_t DefaultNumBins(std::uint64_t num_users) {
  if (num_users < 3) return 2;
  const double log_n = std::log(static_cast<double>(num_users));
  const double bins = std::floor(static_cast<double>(num_users) / (log_n * log_n));
  return bins < 2.0 ? 2 : static_cast<std::uint64_t>(bins);
}

FEParams DeriveFEParams(Variant variant, std::uint64_t num_users,
                        std::uint64_t domain_size, std::uint64_t num_bins,
                        double epsilon, double delta, double gamma_robust) {
  if (num_users < 1) Fail("n must be >= 1");
  if (domain_size < 1) Fail("B must be >= 1");
  CheckPrivacyBudget(epsilon, delta);
  CheckGammaRobust(gamma_robust);

  FEParams params;
  params.variant = variant;
  params.num_users = num_users;
  params.domain_size = domain_size;
  params.epsilon = epsilon;
  params.delta = delta;
  params.gamma_robust = gamma_robust;

  if (variant == Variant::kFE0) {
    params.num_bins = domain_size;
    params.rho =
        BlanketNoiseRate(num_users, domain_size, epsilon, delta, gamma_robust);
    if (params.rho > 1.0) {
      throw ConfigurationError("FE0 requires rho <= 1 (got rho=" +
                               Num(params.rho) + "); use variant fe1");
    }
    return params;
  }

  if (num_bins < 2 || num_bins > domain_size / 2) {
    Fail("FE1 requires 2 <= b <= B/2 (got b=" + std::to_string(num_bins) +
         ", B=" + std::to_string(domain_size) + ")");
  }
  params.num_bins = num_bins;
  params.prime = SmallestPrimeGeq(domain_size);
  params.p_col = CollisionProbability(params.prime, num_bins);
  params.rho =
      BlanketNoiseRate(num_users, num_bins, epsilon, delta, gamma_robust);
  return params;
}

double ErrorBoundAlpha(const FEParams& params, double beta) {
  if (!(beta > 0.0 && beta <= 1.0)) {
    Fail("beta must satisfy 0 < beta <= 1 (got " + Num(beta) + ")");
  }
  if (params.domain_size < 1) Fail("B must be >= 1");
  CheckPrivacyBudget(params.epsilon, params.delta);
  CheckGammaRobust(params.gamma_robust);
  const double log_term =
      3.0 * std::log(2.0 * static_cast<double>(params.domain_size) / beta);
  const double noise = 32.0 * std::log(2.0 / params.delta) /
                       (params.gamma_robust * params.epsilon * params.epsilon);
  if (params.variant == Variant::kFE0) {
    return std::max(log_term, std::sqrt(log_term * noise));
  }
  if (params.num_bins < 1) Fail("b must be >= 1");
  const double collisions = static_cast<double>(params.num_users) /
                            static_cast<double>(params.num_bins);
  return 2.0 * std::max(log_term, std::sqrt(log_term * (collisions + noise)));
}

HHDParams DeriveHHDParams(std::uint64_t num_users, std::uint64_t domain_size,
                          std::uint64_t num_bins, double epsilon, double delta,
                          double phi, double gamma_hh, double c_sub,
                          double gamma_robust) {
  if (num_users < 1) Fail("n must be >= 1");
  if (domain_size < 2 || !std::has_single_bit(domain_size)) {
    Fail("B must be a power of two >= 2 (got " + std::to_string(domain_size) +
         ")");
  }
  if (num_bins < 2) Fail("b must be >= 2 (got " + std::to_string(num_bins) + ")");
  if (!(phi > 0.0 && phi < 1.0)) {
    Fail("phi must satisfy 0 < phi < 1 (got " + Num(phi) + ")");
  }
  if (!(gamma_hh > 0.0 && gamma_hh < 1.0)) {
    Fail("gamma_hh must satisfy 0 < gamma_hh < 1 (got " + Num(gamma_hh) + ")");
  }
  if (!(c_sub > 0.0)) Fail("c_sub must be > 0 (got " + Num(c_sub) + ")");
  CheckPrivacyBudget(epsilon, delta);
  CheckGammaRobust(gamma_robust);

  HHDParams params;
  params.num_users = num_users;
  params.domain_size = domain_size;
  params.num_bins = num_bins;
  params.epsilon = epsilon;
  params.delta = delta;
  params.gamma_robust = gamma_robust;
  params.phi = phi;
  params.gamma_hh = gamma_hh;
  params.c_sub = c_sub;
  params.levels = std::countr_zero(domain_size);

  const double heavy_count = phi * static_cast<double>(num_users);
  const double q_sub = c_sub / heavy_count *
                       std::log(static_cast<double>(domain_size) / gamma_hh);
  params.q_sub_clamped = q_sub > 1.0;
  params.q_sub = params.q_sub_clamped ? 1.0 : q_sub;
  params.prune_threshold = params.q_sub / 2.0 * heavy_count;
  params.report_threshold = heavy_count;

  if (phi * static_cast<double>(num_bins) < 1.0) {
    params.warnings.push_back(
        "phi * b < 1: the candidate-set size bound assumes phi = Omega(1/b)");
  }
  if (params.q_sub_clamped) {
    params.warnings.push_back("q_sub clamped to 1");
  }

  const int levels = params.levels;
  for (int level = 1; level <= levels; ++level) {
    HHDLayer layer;
    layer.level = level;
    if (level == levels) {
      layer.epsilon = epsilon / 2.0;
      layer.delta = delta / 2.0;
    } else {
      layer.epsilon = epsilon / (2.0 * levels);
      layer.delta = delta / (2.0 * levels);
    }
    const std::uint64_t layer_domain = std::uint64_t{1} << level;
    FEParams& fe = layer.fe;
    fe.num_users = num_users;
    fe.domain_size = layer_domain;
    fe.epsilon = layer.epsilon;
    fe.delta = layer.delta;
    fe.gamma_robust = gamma_robust;
    if (layer_domain >= 2 * num_bins) {
      fe.variant = Variant::kFE1;
      fe.num_bins = num_bins;
      fe.prime = SmallestPrimeGeq(layer_domain);
      fe.p_col = CollisionProbability(fe.prime, num_bins);
      fe.rho = BlanketNoiseRate(num_users, num_bins, layer.epsilon,
                                layer.delta, gamma_robust);
    } else {
      // May exceed 1; layer randomizers send floor(rho) noises plus one more
      // with probability rho - floor(rho).
      fe.variant = Variant::kFE0;
      fe.num_bins = layer_domain;
      fe.rho = BlanketNoiseRate(num_users, layer_domain, layer.epsilon,
                                layer.delta, gamma_robust);
    }
    params.layers.push_back(layer);
  }
  return params;
}

}  // namespace shuffledp
