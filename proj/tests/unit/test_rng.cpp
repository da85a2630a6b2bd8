// Copyright 2026 The maplim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "maplim/rng.hpp"

namespace maplim {
namespace {

using Ctr = Philox4x32::Counter;

// Known-answer vectors for Philox4x32-10.
TEST(Philox, KnownAnswerZero) {
  const Ctr out = Philox4x32::apply({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (Ctr{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerOnes) {
  const Ctr out = Philox4x32::apply({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                    {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out, (Ctr{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPi) {
  const Ctr out = Philox4x32::apply({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                    {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out, (Ctr{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Stream, SameKeyReplaysBitIdentical) {
  Stream a(42, 7, 3);
  Stream b(42, 7, 3);
  for (int k = 0; k < 1000; ++k) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(Stream, ReplicatesAndSubstreamsDiffer) {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t r = 0; r < 16; ++r) {
    for (std::uint32_t s = 0; s < 16; ++s) firsts.insert(Stream(42, r, s).next_u64());
  }
  EXPECT_EQ(firsts.size(), 256u);
  EXPECT_NE(Stream(1, 0).next_u64(), Stream(2, 0).next_u64());
}

TEST(Stream, UniformIsOpenUnitInterval) {
  Stream rng(1, 0);
  double sum = 0.0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    const double u = rng.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(Stream, ExponentialMean) {
  Stream rng(2, 0);
  const int n = 200000;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) sum += rng.exponential(4.0);
  EXPECT_NEAR(sum / n, 0.25, 4.0 * 0.25 / std::sqrt(n));
}

TEST(Stream, BetaPairIsComplementaryWithCorrectMean) {
  Stream rng(3, 0);
  const int n = 100000;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const auto [x, w] = rng.beta(0.5, 1.5);
    ASSERT_GE(x, 0.0);
    ASSERT_LE(x, 1.0);
    ASSERT_NEAR(x + w, 1.0, 1e-15);
    sum += x;
  }
  // Beta(a, b) mean a / (a + b), variance ab / ((a + b)^2 (a + b + 1)).
  const double sd = std::sqrt(0.75 / 12.0);
  EXPECT_NEAR(sum / n, 0.25, 4.0 * sd / std::sqrt(n));
}

TEST(Stream, LogGammaHandlesTinyShape) {
  Stream rng(4, 0);
  for (int k = 0; k < 1000; ++k) ASSERT_TRUE(std::isfinite(rng.log_gamma_variate(1e-3)));
}

TEST(Stream, GeometricFailuresMean) {
  Stream rng(5, 0);
  const int n = 200000;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) sum += static_cast<double>(rng.geometric_failures(0.25));
  // Mean (1 - p) / p = 3, variance (1 - p) / p^2 = 12.
  EXPECT_NEAR(sum / n, 3.0, 4.0 * std::sqrt(12.0 / n));
}

TEST(Stream, CategoricalFrequencies) {
  Stream rng(6, 0);
  const std::vector<double> w{1.0, 0.0, 3.0};
  std::vector<int> counts(3, 0);
  const int n = 100000;
  for (int k = 0; k < n; ++k) ++counts[rng.categorical(w)];
  EXPECT_EQ(counts[1], 0);
  EXPECT_NEAR(counts[0] / static_cast<double>(n), 0.25, 0.01);
}

}  // namespace
}  // namespace maplim
