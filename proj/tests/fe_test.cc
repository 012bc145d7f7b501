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
#include <set>

#include "gtest/gtest.h"
#include "shuffledp/errors.h"

namespace shuffledp {
namespace {

FEParams SmallFE1(std::uint64_t n, double rho = 0.0) {
  FEParams p;
  p.variant = Variant::kFE1;
  p.num_users = n;
  p.domain_size = 10;
  p.num_bins = 3;
  p.prime = 11;
  p.rho = rho;
  p.p_col = CollisionProbability(11, 3);
  return p;
}

FEParams SmallFE0(std::uint64_t n, std::uint64_t domain, double rho) {
  FEParams p;
  p.variant = Variant::kFE0;
  p.num_users = n;
  p.domain_size = domain;
  p.num_bins = domain;
  p.rho = rho;
  return p;
}

TEST(RandomizeFE0Test, NoNoise) {
  Rng rng(1);
  const auto out = RandomizeFE0(4, SmallFE0(10, 10, 0.0), rng);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].value, 4u);
}

TEST(RandomizeFE0Test, AlwaysNoiseAtRhoOne) {
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const auto out = RandomizeFE0(7, SmallFE0(10, 10, 1.0), rng);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0].value, 7u);
    EXPECT_GE(out[1].value, 1u);
    EXPECT_LE(out[1].value, 10u);
  }
}

TEST(RandomizeFE0Test, MeanSize) {
  Rng rng(3);
  const FEParams p = SmallFE0(10, 10, 0.4642);
  const int runs = 100000;
  double total = 0;
  for (int i = 0; i < runs; ++i) total += RandomizeFE0(1, p, rng).size();
  const double se = std::sqrt(0.4642 * (1 - 0.4642) / runs);
  EXPECT_NEAR(total / runs, 1.4642, 3 * se);
}

TEST(RandomizeFE0Test, RejectsLargeRhoButLiftedAccepts) {
  Rng rng(4);
  const FEParams p = SmallFE0(10, 10, 2.5);
  EXPECT_THROW(RandomizeFE0(1, p, rng), ConfigurationError);
  const auto out = RandomizeFE0Lifted(1, p, rng);
  EXPECT_TRUE(out.size() == 3u || out.size() == 4u);
  EXPECT_THROW(RandomizeFE0(11, SmallFE0(10, 10, 0.1), rng), InvalidInputError);
}

TEST(AnalyzeFE0Test, Corrections) {
  FE0Bag three({{3}, {3}, {3}});
  EXPECT_DOUBLE_EQ(AnalyzeFE0(three, SmallFE0(3, 10, 0.0), 3).g_hat, 3.0);
  FE0Bag five({{2}, {2}, {2}, {2}, {2}, {1}});
  // 5 - 100 * 0.5 / 10.
  EXPECT_DOUBLE_EQ(AnalyzeFE0(five, SmallFE0(100, 10, 0.5), 2).g_hat, 0.0);
  EXPECT_DOUBLE_EQ(AnalyzeFE0(FE0Bag(), SmallFE0(0, 10, 0.5), 2).g_hat, 0.0);
}

TEST(AnalyzeFE0Test, AllMatchesSingle) {
  Rng rng(5);
  const FEParams p = SmallFE0(50, 20, 0.7);
  std::vector<std::vector<FE0Message>> users;
  for (int i = 0; i < 50; ++i) users.push_back(RandomizeFE0(1 + i % 20, p, rng));
  const FE0Bag bag = Shuffle<FE0Message>(users, rng);
  const auto all = AnalyzeFE0All(bag, p);
  ASSERT_EQ(all.size(), 20u);
  for (Element x = 1; x <= 20; ++x) {
    EXPECT_EQ(all[x - 1], AnalyzeFE0(bag, p, x));
  }
}

TEST(HashEvalTest, HandValues) {
  EXPECT_EQ(HashEval(2, 3, 2, 11, 3), 1u);
  EXPECT_EQ(HashEval(2, 3, 9, 11, 3), 1u);
  for (Element x = 0; x < 11; ++x) EXPECT_EQ(HashEval(1, 0, x, 11, 11), x);
  // Large operands must not overflow.
  const std::uint64_t q = 4294967311ULL;  // prime above 2^32
  EXPECT_EQ(HashEval(q - 1, q - 1, q - 1, q, q), ((q - 1) * (__int128)(q - 1) + q - 1) % q);
}

TEST(RandomizeFE1Test, NoNoiseSingleConsistentTriple) {
  Rng rng(6);
  const FEParams p = SmallFE1(1);
  for (Element x = 1; x <= 10; ++x) {
    const auto out = RandomizeFE1(x, p, rng);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_GE(out[0].u, 1u);
    EXPECT_LT(out[0].u, 11u);
    EXPECT_LT(out[0].v, 11u);
    EXPECT_EQ(HashEval(out[0].u, out[0].v, x, 11, 3), out[0].w);
  }
}

TEST(RandomizeFE1Test, SizeAndMean) {
  Rng rng(7);
  const FEParams p = SmallFE1(1, 4.643);
  const int runs = 100000;
  double total = 0;
  for (int i = 0; i < runs; ++i) {
    const auto out = RandomizeFE1(5, p, rng);
    ASSERT_TRUE(out.size() == 5u || out.size() == 6u);
    ASSERT_EQ(HashEval(out[0].u, out[0].v, 5, 11, 3), out[0].w);
    total += out.size();
  }
  const double se = std::sqrt(0.643 * 0.357 / runs);
  EXPECT_NEAR(total / runs, 5.643, 3 * se);
}

TEST(AnalyzeFE1SingleTest, HandEvaluation) {
  FE1Bag bag({{2, 3, 1}, {2, 3, 0}});
  const FEParams p = SmallFE1(2);
  EXPECT_EQ(CountFE1Matches(bag, p, 2), 1u);
  EXPECT_NEAR(AnalyzeFE1Single(bag, p, 2).g_hat, 0.625, 1e-12);
  EXPECT_DOUBLE_EQ(AnalyzeFE1Single(FE1Bag(), SmallFE1(0), 2).g_hat, 0.0);
}

TEST(AnalyzeFE1SingleTest, AllUsersSameElement) {
  Rng rng(8);
  const FEParams p = SmallFE1(200);
  std::vector<std::vector<FE1Message>> users;
  for (int i = 0; i < 200; ++i) users.push_back(RandomizeFE1(6, p, rng));
  const FE1Bag bag = Shuffle<FE1Message>(users, rng);
  EXPECT_NEAR(AnalyzeFE1Single(bag, p, 6).g_hat, 200.0, 1e-9);
}

TEST(EnumeratePreimagesTest, HandExample) {
  EXPECT_EQ(ModInverse(2, 11), 6u);
  EXPECT_EQ(EnumeratePreimages(2, 3, 1, 11, 3, 10),
            (std::vector<Element>{2, 6, 9, 10}));
}

TEST(EnumeratePreimagesTest, IdentityHash) {
  for (std::uint64_t w = 0; w < 11; ++w) {
    const auto pre = EnumeratePreimages(1, 0, w, 11, 11, 10);
    if (w >= 1 && w <= 10) {
      EXPECT_EQ(pre, std::vector<Element>{w});
    } else {
      EXPECT_TRUE(pre.empty());
    }
  }
}

TEST(EnumeratePreimagesTest, MatchesBruteForce) {
  Rng rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    const std::uint64_t domain = UniformInt(rng, 2, 300);
    const std::uint64_t q = SmallestPrimeGeq(domain);
    const std::uint64_t b = UniformInt(rng, 1, q);
    const std::uint64_t u = UniformInt(rng, 1, q - 1);
    const std::uint64_t v = UniformInt(rng, 0, q - 1);
    const std::uint64_t w = UniformInt(rng, 0, b - 1);
    std::vector<Element> expected;
    for (Element x = 1; x <= domain; ++x) {
      if (HashEval(u, v, x, q, b) == w) expected.push_back(x);
    }
    ASSERT_EQ(EnumeratePreimages(u, v, w, q, b, domain), expected);
  }
}

TEST(AnalyzeFE1AllTest, EmptyBagIsPureBias) {
  FEParams p = SmallFE1(40, 0.3);
  const auto all = AnalyzeFE1All(FE1Bag(), p);
  const double expected = -(40 * 0.3 / 3 + 40 * p.p_col) / (1 - p.p_col);
  ASSERT_EQ(all.size(), 10u);
  for (const auto& e : all) EXPECT_DOUBLE_EQ(e.g_hat, expected);
}

TEST(AnalyzeFE1AllTest, OneTripleIncrementsItsPreimages) {
  FEParams p = SmallFE1(1);
  const auto all = AnalyzeFE1All(FE1Bag({{2, 3, 1}}), p);
  const std::set<Element> pre{2, 6, 9, 10};
  const double hit = (1 - p.p_col) / (1 - p.p_col);
  for (const auto& e : all) {
    if (pre.count(e.element)) {
      EXPECT_DOUBLE_EQ(e.g_hat, hit);
    } else {
      EXPECT_DOUBLE_EQ(e.g_hat, -p.p_col / (1 - p.p_col));
    }
  }
}

TEST(AnalyzeFE1AllTest, MatchesSingleAndIsOrderInsensitive) {
  Rng rng(10);
  const FEParams p = DeriveFEParams(Variant::kFE1, 300, 120, 17, 1.0, 0.1);
  std::vector<std::vector<FE1Message>> users;
  for (int i = 0; i < 300; ++i) {
    users.push_back(RandomizeFE1(UniformInt(rng, 1, 120), p, rng));
  }
  const FE1Bag bag = Shuffle<FE1Message>(users, rng);
  const auto all = AnalyzeFE1All(bag, p);
  for (Element x = 1; x <= 120; ++x) {
    ASSERT_EQ(all[x - 1], AnalyzeFE1Single(bag, p, x)) << x;
  }
  for (int r = 0; r < 3; ++r) {
    EXPECT_EQ(AnalyzeFE1All(bag.Reordered(rng), p), all);
  }
}

TEST(AnalyzeFE1AllTest, RejectsOutOfRangeMessages) {
  const FEParams p = SmallFE1(1);
  EXPECT_THROW(AnalyzeFE1All(FE1Bag({{0, 3, 1}}), p), InvalidInputError);
  EXPECT_THROW(AnalyzeFE1All(FE1Bag({{2, 11, 1}}), p), InvalidInputError);
  EXPECT_THROW(AnalyzeFE1All(FE1Bag({{2, 3, 3}}), p), InvalidInputError);
}

TEST(NoiseMechanismTest, FE1Mapping) {
  const FEParams p = DeriveFEParams(Variant::kFE1, 10000, 200, 100, 1.0, 0.05);
  const BIBParams bib = FE1NoiseMechanism(p);
  EXPECT_EQ(p.prime, 211u);
  EXPECT_EQ(bib.m, 210u * 211u * 100u);
  EXPECT_EQ(bib.s, 210u * 211u);
  EXPECT_EQ(bib.k, 10000u * static_cast<std::uint64_t>(std::floor(p.rho)));
  EXPECT_EQ(bib.n, 10000u);
  EXPECT_NEAR(bib.p, p.rho - std::floor(p.rho), 1e-15);

  const auto special = FE1SpecialBins(p, 17);
  ASSERT_EQ(special.size(), bib.s);
  EXPECT_TRUE(std::is_sorted(special.begin(), special.end()));
  EXPECT_EQ(std::adjacent_find(special.begin(), special.end()), special.end());
  for (std::uint64_t bin : special) {
    EXPECT_GE(bin, 1u);
    EXPECT_LE(bin, bib.m);
  }
  FE1Message msg{5, 7, HashEval(5, 7, 17, p.prime, p.num_bins)};
  EXPECT_TRUE(std::binary_search(special.begin(), special.end(),
                                 FE1TripleBin(msg, p)));
}

TEST(NoiseMechanismTest, FE0Mapping) {
  const FEParams p = DeriveFEParams(Variant::kFE0, 100000, 100, 100, 1.0, 1e-6);
  const BIBParams bib = FE0NoiseMechanism(p);
  EXPECT_EQ(bib.m, 100u);
  EXPECT_EQ(bib.s, 1u);
  EXPECT_EQ(bib.k, 0u);
  EXPECT_EQ(bib.n, 100000u);
  EXPECT_DOUBLE_EQ(bib.p, p.rho);
}

}  // namespace
}  // namespace shuffledp
