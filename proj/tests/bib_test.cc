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
#include <numeric>

#include "gtest/gtest.h"
#include "shuffledp/errors.h"

namespace shuffledp {
namespace {

std::vector<std::uint64_t> Range(std::uint64_t lo, std::uint64_t hi) {
  std::vector<std::uint64_t> out(hi - lo + 1);
  std::iota(out.begin(), out.end(), lo);
  return out;
}

TEST(BIBMechanismTest, OnlyRealBall) {
  Rng rng(1);
  const BIBParams p{5, 5, 0, 0, 0.0};
  const auto special = Range(1, 5);
  std::vector<int> seen(6, 0);
  for (int i = 0; i < 1000; ++i) {
    const auto balls = BIBMechanism(p, special, rng);
    ASSERT_EQ(balls.size(), 1u);
    ASSERT_GE(balls[0], 1u);
    ASSERT_LE(balls[0], 5u);
    ++seen[balls[0]];
  }
  for (int x = 1; x <= 5; ++x) EXPECT_GT(seen[x], 100);
}

TEST(BIBMechanismTest, FixedNoiseCount) {
  Rng rng(2);
  const BIBParams p{3, 1, 2, 0, 0.0};
  const std::vector<std::uint64_t> special{2};
  for (int i = 0; i < 100; ++i) {
    const auto balls = BIBMechanism(p, special, rng);
    ASSERT_EQ(balls.size(), 3u);
    EXPECT_EQ(balls[0], 2u);
    EXPECT_NE(std::count(balls.begin(), balls.end(), 2u), 0);
  }
}

TEST(BIBMechanismTest, DeterministicForSeed) {
  const BIBParams p{50, 5, 10, 20, 0.3};
  const auto special = Range(1, 5);
  Rng a(42), b(42);
  EXPECT_EQ(BIBMechanism(p, special, a), BIBMechanism(p, special, b));
}

TEST(BIBMechanismTest, CoinBallsAreBinomial) {
  Rng rng(3);
  const BIBParams p{10, 1, 0, 40, 0.25};
  const std::vector<std::uint64_t> special{1};
  const int runs = 20000;
  double total = 0;
  for (int i = 0; i < runs; ++i) total += BIBMechanism(p, special, rng).size() - 1;
  EXPECT_NEAR(total / runs, 10.0, 4 * std::sqrt(40 * 0.25 * 0.75 / runs));
}

TEST(BIBMechanismTest, RejectsBadSpecialSets) {
  Rng rng(4);
  const BIBParams p{5, 2, 0, 0, 0.0};
  EXPECT_THROW(BIBMechanism(p, std::vector<std::uint64_t>{1}, rng), InvalidInputError);
  EXPECT_THROW(BIBMechanism(p, std::vector<std::uint64_t>{1, 1}, rng), InvalidInputError);
  EXPECT_THROW(BIBMechanism(p, std::vector<std::uint64_t>{1, 6}, rng), InvalidInputError);
}

TEST(ToLoadsTest, CountsPerBin) {
  const std::vector<std::uint64_t> balls{1, 3, 3, 4};
  const BinLoadVector loads = ToLoads(balls, 4);
  EXPECT_EQ(loads.loads, (std::vector<std::uint64_t>{1, 0, 2, 1}));
  EXPECT_EQ(loads.total(), 4u);
}

TEST(CheckPrivacyConditionTest, Cases) {
  const double delta = 0.05;
  const auto k = static_cast<std::uint64_t>(std::ceil(32 * std::log(2 / delta)));
  EXPECT_TRUE(CheckPrivacyCondition({7, 7, k, 0, 0.0}, 1.0, delta));
  EXPECT_FALSE(CheckPrivacyCondition({7, 7, k - 1, 0, 0.0}, 1.0, delta));
  EXPECT_FALSE(CheckPrivacyCondition({100, 1, 0, 0, 0.0}, 1.0, delta));
  EXPECT_TRUE(CheckPrivacyCondition({10, 2, 2400, 0, 0.0}, 1.0, 1e-6));
  EXPECT_FALSE(CheckPrivacyCondition({10, 2, 2300, 0, 0.0}, 1.0, 1e-6));
  EXPECT_TRUE(CheckPrivacyCondition({10, 2, 0, 4800, 0.5}, 1.0, 1e-6));
}

TEST(ExactPrivacyFailureTest, Deterministic) {
  EXPECT_DOUBLE_EQ(ExactPrivacyFailure({4, 4, 2, 0, 0.0}, 0.3), 1.0);
  EXPECT_DOUBLE_EQ(ExactPrivacyFailure({4, 4, 2, 0, 0.0}, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(ExactPrivacyFailure({4, 4, 0, 4, 1.0}, std::log(1.25)), 1.0);
  EXPECT_DOUBLE_EQ(ExactPrivacyFailure({1, 1, 2, 0, 0.0}, 0.3), 1.0);
}

TEST(ExactPrivacyFailureTest, SingleNoiseBall) {
  EXPECT_NEAR(ExactPrivacyFailure({2, 1, 1, 0, 0.0}, 1.0), 0.5, 1e-15);
}

// Brute force over the joint pmf of (X1, X2) for small k, n.
double BruteForceFailure(const BIBParams& p, double epsilon) {
  const double r = static_cast<double>(p.s) / p.m;
  auto binom = [](std::uint64_t n, std::uint64_t i, double q) {
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) -
                    std::lgamma(n - i + 1.0)) *
           std::pow(q, i) * std::pow(1 - q, n - i);
  };
  std::vector<double> pmf(p.k + p.n + 1, 0.0);
  for (std::uint64_t i = 0; i <= p.k; ++i) {
    for (std::uint64_t j = 0; j <= p.n; ++j) {
      pmf[i + j] += binom(p.k, i, r) * binom(p.n, j, p.p * r);
    }
  }
  double fail = 0;
  for (std::size_t a = 0; a < pmf.size(); ++a) {
    for (std::size_t b = 0; b < pmf.size(); ++b) {
      if (b == 0 || std::log((1.0 + a) / b) >= epsilon) fail += pmf[a] * pmf[b];
    }
  }
  return fail;
}

TEST(ExactPrivacyFailureTest, MatchesBruteForce) {
  const std::vector<BIBParams> cases{{10, 3, 12, 7, 0.4}, {5, 1, 30, 0, 0.0},
                                     {8, 8, 3, 9, 0.9},   {20, 7, 0, 25, 0.6},
                                     {100, 30, 60, 40, 0.2}};
  for (const BIBParams& p : cases) {
    for (double eps : {0.1, 0.5, 1.0, 2.0}) {
      EXPECT_NEAR(ExactPrivacyFailure(p, eps), BruteForceFailure(p, eps), 1e-12)
          << p.m << " " << p.s << " " << p.k << " " << p.n << " " << eps;
    }
  }
}

TEST(ExactPrivacyFailureTest, SizeCap) {
  EXPECT_THROW(ExactPrivacyFailure({10, 1, kExactModeCap, 1, 0.5}, 1.0),
               SizeLimitError);
}

TEST(ExactPrivacyAuditTest, ReportFields) {
  const BIBParams p{10, 2, 2400, 0, 0.0};
  const PrivacyAuditReport r = ExactPrivacyAudit(p, 1.0, 1e-6);
  EXPECT_EQ(r.mode, AuditMode::kExact);
  EXPECT_TRUE(r.condition_holds);
  EXPECT_LE(r.failure_probability, 1e-6);
  EXPECT_FALSE(r.trials.has_value());
  EXPECT_EQ(AuditModeName(r.mode), "exact");
}

TEST(MonteCarloPrivacyLossTest, IdenticalSetsNeverFail) {
  const BIBParams p{20, 4, 5, 5, 0.5};
  const auto s = Range(1, 4);
  const auto r = MonteCarloPrivacyLoss(p, s, s, 0.01, 0.05, 2000, 7);
  EXPECT_EQ(r.failure_probability, 0.0);
  EXPECT_EQ(r.trials, 2000u);
}

TEST(MonteCarloPrivacyLossTest, TwoBinsOneCoin) {
  // Real ball in bin 1, one certain noise ball uniform over {1, 2}: loads are
  // (2, 0) or (1, 1); the ratio is undefined (fails) or 1 (passes).
  const BIBParams p{2, 1, 0, 1, 1.0};
  const std::vector<std::uint64_t> s{1}, s2{2};
  const auto r = MonteCarloPrivacyLoss(p, s, s2, 0.1, 0.05, 100000, 11);
  const double se = std::sqrt(0.25 / 100000);
  EXPECT_NEAR(r.failure_probability, 0.5, 3 * se);
  ASSERT_TRUE(r.standard_error.has_value());
  EXPECT_NEAR(*r.standard_error, se, 1e-4);
}

TEST(MonteCarloPrivacyLossTest, PrivateParametersStayBelowDelta) {
  const BIBParams p{100, 10, 1200, 0, 0.0};
  ASSERT_TRUE(CheckPrivacyCondition(p, 1.0, 0.05));
  const auto r = MonteCarloPrivacyLoss(p, Range(1, 10), Range(91, 100), 1.0,
                                       0.05, 100000, 13);
  EXPECT_LE(r.failure_probability, 0.05 + 3 * *r.standard_error);
}

TEST(MonteCarloPrivacyLossTest, ThreadCountDoesNotMatter) {
  const BIBParams p{50, 5, 100, 100, 0.5};
  const auto a = MonteCarloPrivacyLoss(p, Range(1, 5), Range(46, 50), 0.5, 0.1,
                                       5000, 99, 1);
  const auto b = MonteCarloPrivacyLoss(p, Range(1, 5), Range(46, 50), 0.5, 0.1,
                                       5000, 99, 4);
  EXPECT_EQ(a, b);
}

TEST(MonteCarloInequalityTest, AgreesWithExact) {
  for (const BIBParams& p : std::vector<BIBParams>{{10, 3, 60, 40, 0.4},
                                                   {30, 2, 200, 0, 0.0}}) {
    const double exact = ExactPrivacyFailure(p, 0.5);
    const auto mc = MonteCarloInequality(p, 0.5, 0.1, 200000, 5);
    EXPECT_NEAR(mc.failure_probability, exact,
                4 * std::sqrt(exact * (1 - exact) / 200000) + 1e-9);
  }
}

TEST(RatioFailsTest, Boundary) {
  EXPECT_TRUE(RatioFails(1, 0, 5.0));
  EXPECT_TRUE(RatioFails(5, 4, std::log(1.25)));
  EXPECT_FALSE(RatioFails(5, 4, std::log(1.26)));
  EXPECT_FALSE(RatioFails(0, 3, 0.1));
}

}  // namespace
}  // namespace shuffledp
