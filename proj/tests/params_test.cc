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

#include <cmath>

#include "gtest/gtest.h"
#include "shuffledp/errors.h"

namespace shuffledp {
namespace {

TEST(SmallestPrimeGeqTest, KnownValues) {
  EXPECT_EQ(SmallestPrimeGeq(2), 2u);
  EXPECT_EQ(SmallestPrimeGeq(7), 7u);
  EXPECT_EQ(SmallestPrimeGeq(1000), 1009u);
  EXPECT_EQ(SmallestPrimeGeq(10000), 10007u);
  EXPECT_EQ(SmallestPrimeGeq(200), 211u);
}

TEST(SmallestPrimeGeqTest, MatchesTrialDivisionScan) {
  auto naive_prime = [](std::uint64_t v) {
    if (v < 2) return false;
    for (std::uint64_t d = 2; d * d <= v; ++d) {
      if (v % d == 0) return false;
    }
    return true;
  };
  for (std::uint64_t b = 2; b <= 5000; ++b) {
    std::uint64_t q = b;
    while (!naive_prime(q)) ++q;
    ASSERT_EQ(SmallestPrimeGeq(b), q) << b;
    ASSERT_LT(q, 2 * b);
  }
}

TEST(SmallestPrimeGeqTest, RejectsBelowTwo) {
  EXPECT_THROW(SmallestPrimeGeq(0), InvalidParameterError);
  EXPECT_THROW(SmallestPrimeGeq(1), InvalidParameterError);
}

TEST(BlanketNoiseRateTest, ClosedForm) {
  // 32 ln(2e6) / 1000 and ten times that.
  EXPECT_NEAR(BlanketNoiseRate(100000, 100, 1.0, 1e-6), 0.464277, 1e-6);
  EXPECT_NEAR(BlanketNoiseRate(100000, 1000, 1.0, 1e-6), 4.64277, 1e-5);
  const double expected = 32.0 * std::log(2.0 / 0.05) / (0.5 * 0.25) * 50 / 1e4;
  EXPECT_DOUBLE_EQ(BlanketNoiseRate(10000, 50, 0.5, 0.05, 0.5), expected);
}

TEST(BlanketNoiseRateTest, RejectsBadPrivacyArguments) {
  EXPECT_THROW(BlanketNoiseRate(100, 10, 1.0, 2.0), InvalidParameterError);
  EXPECT_THROW(BlanketNoiseRate(100, 10, 1.0, 0.0), InvalidParameterError);
  EXPECT_THROW(BlanketNoiseRate(100, 10, 0.0, 0.1), InvalidParameterError);
  EXPECT_THROW(BlanketNoiseRate(100, 10, 3.5, 0.1), InvalidParameterError);
  EXPECT_THROW(BlanketNoiseRate(100, 10, 1.0, 0.1, 0.0), InvalidParameterError);
  EXPECT_THROW(BlanketNoiseRate(0, 10, 1.0, 0.1), InvalidParameterError);
}

TEST(CollisionProbabilityTest, SmallCases) {
  EXPECT_NEAR(CollisionProbability(11, 3), 3.0 / 11.0, 1e-15);
  EXPECT_EQ(CollisionProbability(11, 11), 0.0);
  EXPECT_EQ(CollisionProbability(11, 1), 1.0);
  EXPECT_THROW(CollisionProbability(11, 0), InvalidParameterError);
  EXPECT_THROW(CollisionProbability(11, 12), InvalidParameterError);
}

TEST(CollisionProbabilityTest, BruteForceSmallPrimes) {
  for (std::uint64_t q : {2u, 3u, 5u, 7u, 11u, 13u, 17u}) {
    for (std::uint64_t b = 1; b <= q; ++b) {
      const std::uint64_t x = 1, y = 2 % q;
      std::uint64_t hits = 0;
      for (std::uint64_t u = 1; u < q; ++u) {
        for (std::uint64_t v = 0; v < q; ++v) {
          if ((u * x + v) % q % b == (u * y + v) % q % b) ++hits;
        }
      }
      if (x == y) continue;
      EXPECT_NEAR(CollisionProbability(q, b),
                  static_cast<double>(hits) / ((q - 1) * q), 1e-14)
          << q << " " << b;
    }
  }
}

TEST(DeriveFEParamsTest, FE1Example) {
  const FEParams p = DeriveFEParams(Variant::kFE1, 100000, 1000, 100, 1.0, 1e-6);
  EXPECT_EQ(p.prime, 1009u);
  EXPECT_NEAR(p.rho, 0.4643, 1e-4);
  EXPECT_NEAR(p.p_col, 0.0090259, 1e-7);
  EXPECT_LT(p.p_col, 1.0 / p.num_bins);
}

TEST(DeriveFEParamsTest, FE0UsesDomainAndRequiresRhoAtMostOne) {
  const FEParams p = DeriveFEParams(Variant::kFE0, 100000, 100, 7, 1.0, 1e-6);
  EXPECT_EQ(p.num_bins, 100u);
  EXPECT_EQ(p.prime, 0u);
  EXPECT_EQ(p.p_col, 0.0);
  EXPECT_NEAR(p.rho, 0.464277, 1e-6);
  try {
    DeriveFEParams(Variant::kFE0, 100, 1000, 1000, 1.0, 1e-6);
    FAIL() << "expected ConfigurationError";
  } catch (const ConfigurationError& e) {
    EXPECT_NE(std::string(e.what()).find("rho <= 1"), std::string::npos);
  }
}

TEST(DeriveFEParamsTest, FE1BinBounds) {
  EXPECT_THROW(DeriveFEParams(Variant::kFE1, 1000, 100, 51, 1.0, 0.1),
               InvalidParameterError);
  EXPECT_THROW(DeriveFEParams(Variant::kFE1, 1000, 100, 1, 1.0, 0.1),
               InvalidParameterError);
  const FEParams p = DeriveFEParams(Variant::kFE1, 1000, 100, 50, 1.0, 0.1);
  EXPECT_LE(p.p_col, 0.5);
  EXPECT_LT(p.p_col, 1.0 / 50);
}

TEST(DefaultNumBinsTest, Formula) {
  EXPECT_EQ(DefaultNumBins(100000),
            static_cast<std::uint64_t>(100000 / std::pow(std::log(1e5), 2)));
  EXPECT_EQ(DefaultNumBins(3), 2u);
}

TEST(ErrorBoundAlphaTest, ClosedForms) {
  FEParams fe1;
  fe1.variant = Variant::kFE1;
  fe1.num_users = 100000;
  fe1.domain_size = 1024;
  fe1.num_bins = 10000;
  fe1.epsilon = 1.0;
  fe1.delta = 1e-6;
  EXPECT_NEAR(ErrorBoundAlpha(fe1, 0.1), 237.7, 0.1);

  FEParams fe0 = fe1;
  fe0.variant = Variant::kFE0;
  fe0.num_bins = 1024;
  EXPECT_NEAR(ErrorBoundAlpha(fe0, 0.1), 117.6, 0.1);

  EXPECT_THROW(ErrorBoundAlpha(fe0, 2048.0), InvalidParameterError);
  EXPECT_THROW(ErrorBoundAlpha(fe0, 0.0), InvalidParameterError);
}

TEST(DeriveHHDParamsTest, SubsamplingAndThresholds) {
  const HHDParams p = DeriveHHDParams(10000, 256, 32, 1.0, 1e-6, 0.05, 0.1, 16);
  EXPECT_NEAR(p.q_sub, 16.0 / 500.0 * std::log(2560.0), 1e-12);
  EXPECT_NEAR(p.q_sub, 0.2511, 1e-4);
  EXPECT_NEAR(p.prune_threshold, 62.8, 0.05);
  EXPECT_DOUBLE_EQ(p.report_threshold, 500.0);
  EXPECT_FALSE(p.q_sub_clamped);
  EXPECT_EQ(p.levels, 8);
  ASSERT_EQ(p.layers.size(), 8u);
}

TEST(DeriveHHDParamsTest, BudgetSplit) {
  const HHDParams p = DeriveHHDParams(10000, 256, 32, 1.0, 1e-6, 0.05, 0.1);
  double eps_sum = 0.0, delta_sum = 0.0;
  for (int l = 1; l < 8; ++l) {
    EXPECT_DOUBLE_EQ(p.layer(l).epsilon, 1.0 / 16.0);
    EXPECT_DOUBLE_EQ(p.layer(l).delta, 1e-6 / 16.0);
  }
  EXPECT_DOUBLE_EQ(p.layer(8).epsilon, 0.5);
  EXPECT_DOUBLE_EQ(p.layer(8).delta, 0.5e-6);
  for (const HHDLayer& layer : p.layers) {
    eps_sum += layer.epsilon;
    delta_sum += layer.delta;
  }
  EXPECT_LE(eps_sum, 1.0 + 1e-12);
  EXPECT_LE(delta_sum, 1e-6 * (1 + 1e-12));
}

TEST(DeriveHHDParamsTest, LayerVariantsFollowPrefixDomain) {
  const HHDParams p = DeriveHHDParams(10000, 256, 32, 3.0, 0.05, 0.05, 0.1);
  for (const HHDLayer& layer : p.layers) {
    const std::uint64_t width = std::uint64_t{1} << layer.level;
    EXPECT_EQ(layer.fe.variant, width >= 64 ? Variant::kFE1 : Variant::kFE0)
        << layer.level;
    EXPECT_EQ(layer.fe.domain_size, width);
  }
}

TEST(DeriveHHDParamsTest, ClampsAndWarns) {
  const HHDParams p = DeriveHHDParams(100, 64, 4, 1.0, 0.01, 0.1, 0.1);
  EXPECT_EQ(p.q_sub, 1.0);
  EXPECT_TRUE(p.q_sub_clamped);
  EXPECT_FALSE(p.warnings.empty());
  EXPECT_THROW(DeriveHHDParams(100, 100, 4, 1.0, 0.01, 0.1, 0.1),
               InvalidParameterError);
  EXPECT_THROW(DeriveHHDParams(100, 64, 4, 1.0, 0.01, 0.0, 0.1),
               InvalidParameterError);
}

TEST(VariantTest, NamesRoundTrip) {
  EXPECT_EQ(ParseVariant(VariantName(Variant::kFE0)), Variant::kFE0);
  EXPECT_EQ(ParseVariant("fe1"), Variant::kFE1);
  EXPECT_THROW(ParseVariant("fe2"), InvalidParameterError);
}

TEST(ValidateBIBParamsTest, Ranges) {
  EXPECT_NO_THROW(ValidateBIBParams({10, 2, 5, 3, 0.5}));
  EXPECT_THROW(ValidateBIBParams({10, 11, 5, 3, 0.5}), InvalidParameterError);
  EXPECT_THROW(ValidateBIBParams({10, 0, 5, 3, 0.5}), InvalidParameterError);
  EXPECT_THROW(ValidateBIBParams({10, 2, 5, 3, 1.5}), InvalidParameterError);
}

}  // namespace
}  // namespace shuffledp
