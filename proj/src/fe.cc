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

#include "shuffledp/fe.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "shuffledp/errors.h"

namespace shuffledp {
namespace {

void CheckElement(Element x, const FEParams& params) {
  if (x < 1 || x > params.domain_size) {
    throw InvalidInputError("element must lie in [1, B] (got " +
                            std::to_string(x) + ", B=" +
                            std::to_string(params.domain_size) + ")");
  }
}

void CheckVariant(const FEParams& params, Variant expected) {
  if (params.variant != expected) {
    throw InvalidInputError("parameters are for variant " +
                            std::string(VariantName(params.variant)) +
                            ", expected " +
                            std::string(VariantName(expected)));
  }
}

void CheckFE1Shape(const FEParams& params) {
  if (params.prime < 2 || params.num_bins < 1 ||
      params.num_bins > params.prime || params.domain_size > params.prime) {
    throw InvalidParameterError(
        "FE1 parameters need 1 <= b <= q, B <= q and q >= 2");
  }
}

FE1Message UniformTriple(const FEParams& params, Rng& rng) {
  return FE1Message{UniformInt(rng, 1, params.prime - 1),
                    UniformInt(rng, 0, params.prime - 1),
                    UniformInt(rng, 0, params.num_bins - 1)};
}

// floor(rho) plus one more with probability rho - floor(rho).
std::uint64_t DrawNoiseCount(double rho, Rng& rng) {
  const double whole = std::floor(rho);
  auto count = static_cast<std::uint64_t>(whole);
  if (Bernoulli(rng, rho - whole)) ++count;
  return count;
}

}  // namespace

std::vector<FE0Message> RandomizeFE0(Element x, const FEParams& params,
                                     Rng& rng) {
  CheckVariant(params, Variant::kFE0);
  if (params.rho > 1.0) {
    throw ConfigurationError("FE0 requires rho <= 1 (got rho=" +
                             std::to_string(params.rho) + "); use variant fe1");
  }
  CheckElement(x, params);
  std::vector<FE0Message> out{FE0Message{x}};
  if (Bernoulli(rng, params.rho)) {
    out.push_back(FE0Message{UniformInt(rng, 1, params.domain_size)});
  }
  return out;
}

std::vector<FE0Message> RandomizeFE0Lifted(Element x, const FEParams& params,
                                           Rng& rng) {
  CheckVariant(params, Variant::kFE0);
  CheckElement(x, params);
  const std::uint64_t noises = DrawNoiseCount(params.rho, rng);
  std::vector<FE0Message> out;
  out.reserve(1 + noises);
  out.push_back(FE0Message{x});
  for (std::uint64_t i = 0; i < noises; ++i) {
    out.push_back(FE0Message{UniformInt(rng, 1, params.domain_size)});
  }
  return out;
}

double FE0Estimate(std::uint64_t count, const FEParams& params,
                   double sampling_rate) {
  const double expected_noise = sampling_rate *
                                static_cast<double>(params.num_users) *
                                params.rho /
                                static_cast<double>(params.domain_size);
  return static_cast<double>(count) - expected_noise;
}

FrequencyEstimate AnalyzeFE0(const FE0Bag& bag, const FEParams& params,
                             Element x) {
  std::uint64_t count = 0;
  for (const FE0Message& m : bag) {
    if (m.value == x) ++count;
  }
  return FrequencyEstimate{x, FE0Estimate(count, params)};
}

std::vector<FrequencyEstimate> AnalyzeFE0All(const FE0Bag& bag,
                                             const FEParams& params) {
  std::vector<std::uint64_t> counts(params.domain_size + 1, 0);
  for (const FE0Message& m : bag) {
    if (m.value < 1 || m.value > params.domain_size) {
      throw InvalidInputError("FE0 message outside [1, B]");
    }
    ++counts[m.value];
  }
  std::vector<FrequencyEstimate> out;
  out.reserve(params.domain_size);
  for (Element x = 1; x <= params.domain_size; ++x) {
    out.push_back(FrequencyEstimate{x, FE0Estimate(counts[x], params)});
  }
  return out;
}

std::uint64_t HashEval(std::uint64_t u, std::uint64_t v, Element x,
                       std::uint64_t q, std::uint64_t b) {
  if (q < 2 || u < 1 || u >= q || v >= q || b < 1 || b > q) {
    throw InvalidInputError("hash parameters out of range: need 1 <= u <= q-1, "
                            "0 <= v <= q-1, 1 <= b <= q");
  }
  const unsigned __int128 value =
      static_cast<unsigned __int128>(u) * x + v;
  return static_cast<std::uint64_t>(value % q) % b;
}

std::vector<FE1Message> RandomizeFE1(Element x, const FEParams& params,
                                     Rng& rng) {
  CheckVariant(params, Variant::kFE1);
  CheckFE1Shape(params);
  CheckElement(x, params);
  const std::uint64_t u = UniformInt(rng, 1, params.prime - 1);
  const std::uint64_t v = UniformInt(rng, 0, params.prime - 1);
  const std::uint64_t noises = DrawNoiseCount(params.rho, rng);
  std::vector<FE1Message> out;
  out.reserve(1 + noises);
  out.push_back(FE1Message{u, v, HashEval(u, v, x, params.prime, params.num_bins)});
  for (std::uint64_t i = 0; i < noises; ++i) {
    out.push_back(UniformTriple(params, rng));
  }
  return out;
}

double FE1Estimate(std::uint64_t count, const FEParams& params,
                   double sampling_rate) {
  const double n = static_cast<double>(params.num_users);
  const double bias =
      sampling_rate *
      (n * params.rho / static_cast<double>(params.num_bins) + n * params.p_col);
  return (static_cast<double>(count) - bias) / (1.0 - params.p_col);
}

std::uint64_t CountFE1Matches(const FE1Bag& bag, const FEParams& params,
                              Element x) {
  CheckFE1Shape(params);
  std::uint64_t count = 0;
  for (const FE1Message& m : bag) {
    if (HashEval(m.u, m.v, x, params.prime, params.num_bins) == m.w) ++count;
  }
  return count;
}

FrequencyEstimate AnalyzeFE1Single(const FE1Bag& bag, const FEParams& params,
                                   Element x) {
  return FrequencyEstimate{x, FE1Estimate(CountFE1Matches(bag, params, x), params)};
}

std::uint64_t ModInverse(std::uint64_t u, std::uint64_t q) {
  // Invariant: old_s * u == old_r (mod q).
  std::int64_t old_r = static_cast<std::int64_t>(u % q);
  std::int64_t r = static_cast<std::int64_t>(q);
  std::int64_t old_s = 1;
  std::int64_t s = 0;
  while (r != 0) {
    const std::int64_t quotient = old_r / r;
    std::int64_t tmp = old_r - quotient * r;
    old_r = r;
    r = tmp;
    tmp = old_s - quotient * s;
    old_s = s;
    s = tmp;
  }
  if (old_r != 1) {
    throw InvalidInputError("u has no inverse modulo q");
  }
  std::int64_t inv = old_s % static_cast<std::int64_t>(q);
  if (inv < 0) inv += static_cast<std::int64_t>(q);
  return static_cast<std::uint64_t>(inv);
}

namespace {

// Calls visit(x) for each preimage of (u, v, w), unordered.
template <typename Visit>
void ForEachPreimage(std::uint64_t u, std::uint64_t v, std::uint64_t w,
                     std::uint64_t q, std::uint64_t b, std::uint64_t B,
                     Visit&& visit) {
  if (w >= b) return;
  const unsigned __int128 u_inv = ModInverse(u, q);
  for (std::uint64_t r = w; r < q; r += b) {
    const std::uint64_t shifted = (r + q - v) % q;
    const auto x = static_cast<std::uint64_t>((u_inv * shifted) % q);
    // Residue 0 is element q itself, which lies in [B] only when B = q.
    const std::uint64_t element = x == 0 ? q : x;
    if (element <= B) visit(element);
  }
}

}  // namespace

std::vector<Element> EnumeratePreimages(std::uint64_t u, std::uint64_t v,
                                        std::uint64_t w, std::uint64_t q,
                                        std::uint64_t b, std::uint64_t B) {
  if (q < 2 || u < 1 || u >= q || v >= q || b < 1 || b > q || B > q) {
    throw InvalidInputError("preimage parameters out of range: need "
                            "1 <= u <= q-1, 0 <= v <= q-1, 1 <= b <= q, B <= q");
  }
  std::vector<Element> out;
  ForEachPreimage(u, v, w, q, b, B, [&](Element x) { out.push_back(x); });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<FrequencyEstimate> AnalyzeFE1All(const FE1Bag& bag,
                                             const FEParams& params) {
  CheckFE1Shape(params);
  const std::uint64_t q = params.prime;
  const std::uint64_t b = params.num_bins;
  const std::uint64_t B = params.domain_size;
  std::vector<std::uint64_t> counts(B + 1, 0);
  for (const FE1Message& m : bag) {
    if (m.u < 1 || m.u >= q || m.v >= q || m.w >= b) {
      throw InvalidInputError("FE1 message outside [q-1] x Z_q x Z_b");
    }
    ForEachPreimage(m.u, m.v, m.w, q, b, B, [&](Element x) { ++counts[x]; });
  }
  std::vector<FrequencyEstimate> out;
  out.reserve(B);
  for (Element x = 1; x <= B; ++x) {
    out.push_back(FrequencyEstimate{x, FE1Estimate(counts[x], params)});
  }
  return out;
}

BIBParams FE1NoiseMechanism(const FEParams& params) {
  CheckVariant(params, Variant::kFE1);
  CheckFE1Shape(params);
  const std::uint64_t q = params.prime;
  const double whole = std::floor(params.rho);
  BIBParams bib;
  bib.m = (q - 1) * q * params.num_bins;
  bib.s = (q - 1) * q;
  bib.k = params.num_users * static_cast<std::uint64_t>(whole);
  bib.n = params.num_users;
  bib.p = params.rho - whole;
  return bib;
}

BIBParams FE0NoiseMechanism(const FEParams& params) {
  CheckVariant(params, Variant::kFE0);
  BIBParams bib;
  bib.m = params.domain_size;
  bib.s = 1;
  bib.k = 0;
  bib.n = params.num_users;
  bib.p = params.rho;
  return bib;
}

std::uint64_t FE1TripleBin(const FE1Message& message, const FEParams& params) {
  return 1 + ((message.u - 1) * params.prime + message.v) * params.num_bins +
         message.w;
}

std::vector<std::uint64_t> FE1SpecialBins(const FEParams& params, Element x) {
  CheckVariant(params, Variant::kFE1);
  CheckFE1Shape(params);
  CheckElement(x, params);
  const std::uint64_t q = params.prime;
  std::vector<std::uint64_t> bins;
  bins.reserve((q - 1) * q);
  for (std::uint64_t u = 1; u < q; ++u) {
    for (std::uint64_t v = 0; v < q; ++v) {
      const FE1Message m{u, v, HashEval(u, v, x, q, params.num_bins)};
      bins.push_back(FE1TripleBin(m, params));
    }
  }
  return bins;
}

}  // namespace shuffledp
