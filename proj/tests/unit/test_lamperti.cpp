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

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "maplim/chain.hpp"
#include "maplim/error.hpp"
#include "maplim/lamperti.hpp"
#include "maplim/rng.hpp"

namespace maplim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SteppedPath random_path(Stream& rng, bool absorbed) {
  const int segs = 1 + static_cast<int>(rng.uniform() * 12.0);
  SteppedPath f;
  double t = 0.0;
  double v = 1.0;
  for (int k = 0; k < segs; ++k) {
    f.push(t, v, 1 + static_cast<int>(rng.uniform() * 3.0));
    t += 0.01 + rng.exponential(1.0);
    v *= 0.05 + 0.9 * rng.uniform();
  }
  if (absorbed) f.push(t, 0.0, 0);
  return f;
}

TableKernel halving_table(std::int64_t max_position) {
  std::vector<std::vector<std::vector<RowEntry>>> rows(max_position + 1);
  rows[0].push_back({{0, 1, 1.0}});
  for (std::int64_t n = 1; n <= max_position; ++n) rows[n].push_back({{n / 2, 1, 1.0}});
  return TableKernel(1, std::move(rows));
}

TEST(LampertiTimeChange, ConstantPathIsIdentity) {
  const LampertiResult r = lamperti_time_change(SteppedPath::constant(1.0, 1), -0.7);
  for (double t : {0.0, 0.3, 5.0}) EXPECT_DOUBLE_EQ(r.tau(t), t);
  EXPECT_EQ(r.g.size(), 1u);
  EXPECT_TRUE(std::isinf(r.tau.absorption_time()));
}

TEST(LampertiTimeChange, TwoStepPath) {
  const SteppedPath f({0.0, 1.0, 2.0}, {1.0, 0.5, 0.0}, {1, 1, 0});
  const LampertiResult r = lamperti_time_change(f, -1.0);
  EXPECT_DOUBLE_EQ(r.tau(0.5), 0.5);
  EXPECT_DOUBLE_EQ(r.tau(1.0), 1.0);
  EXPECT_DOUBLE_EQ(r.tau(2.0), 1.5);
  EXPECT_DOUBLE_EQ(r.tau(3.0), 2.0);
  EXPECT_DOUBLE_EQ(r.tau(10.0), 2.0);
  EXPECT_DOUBLE_EQ(r.tau.absorption_time(), 3.0);
  EXPECT_EQ(r.g.times(), (std::vector<double>{0.0, 1.0, 3.0}));
  EXPECT_EQ(r.g.positions(), (std::vector<double>{1.0, 0.5, 0.0}));
  EXPECT_EQ(r.g.types().back(), 0);
}

TEST(LampertiTimeChange, RejectsIncreasingPath) {
  const SteppedPath f({0.0, 1.0, 2.0}, {1.0, 0.0, 0.5}, {1, 1, 1});
  EXPECT_THROW(lamperti_time_change(f, -1.0), ValidationError);
}

TEST(LampertiProperty, RoundTripRecoversPath) {
  Stream rng(201, 0);
  for (double alpha : {-2.0, -1.0, -0.5}) {
    for (int trial = 0; trial < 200; ++trial) {
      const SteppedPath f = random_path(rng, trial % 2 == 0);
      const SteppedPath h = lamperti_time_change(lamperti_time_change(f, alpha).g, -alpha).g;
      ASSERT_EQ(h.size(), f.size());
      for (std::size_t k = 0; k < f.size(); ++k) {
        ASSERT_NEAR(h.times()[k], f.times()[k], 1e-12 * (1.0 + f.times()[k]));
        ASSERT_EQ(h.positions()[k], f.positions()[k]);
        ASSERT_EQ(h.types()[k], f.types()[k]);
      }
    }
  }
}

TEST(LampertiProperty, AbsorptionIsSegmentSum) {
  Stream rng(202, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const SteppedPath f = random_path(rng, true);
    const double alpha = -2.0 * rng.uniform();
    double direct = 0.0;
    for (std::size_t k = 0; k + 1 < f.size(); ++k) {
      direct += (f.times()[k + 1] - f.times()[k]) * std::pow(f.positions()[k], alpha);
    }
    const LampertiResult r = lamperti_time_change(f, alpha);
    ASSERT_EQ(r.tau.absorption_time(), direct);
    ASSERT_EQ(r.tau.source_absorption_time(), f.last_time());
  }
}

TEST(LampertiProperty, ClockIsOneLipschitzForNegativeAlpha) {
  Stream rng(203, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const SteppedPath f = random_path(rng, trial % 3 == 0);
    const LampertiResult r = lamperti_time_change(f, -0.5 - rng.uniform());
    for (double s : r.tau.slopes()) ASSERT_LE(s, 1.0);
    double prev = 0.0;
    ASSERT_EQ(r.tau(0.0), 0.0);
    for (int k = 1; k <= 50; ++k) {
      const double t = 0.2 * k;
      const double v = r.tau(t);
      ASSERT_GE(v, prev);
      ASSERT_LE(v - prev, 0.2 + 1e-12);
      prev = v;
    }
  }
}

TEST(LampertiProperty, InverseClockInvertsTau) {
  Stream rng(204, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const SteppedPath f = random_path(rng, true);
    const LampertiResult r = lamperti_time_change(f, -1.0);
    for (int k = 0; k < 20; ++k) {
      const double u = f.last_time() * k / 20.0;
      ASSERT_NEAR(r.tau(r.tau.inverse(u)), u, 1e-12 * (1.0 + u));
    }
  }
}

TEST(DiscreteLamperti, ConstantChainHoldsOne) {
  const TableKernel k = TableKernel::identity(1, 16);
  Stream rng(1, 0);
  const LampertiResult z = discrete_lamperti(run_chain(k, {16, 1}, rng), 16, 0.5);
  EXPECT_DOUBLE_EQ(z.g.position_at(1e6), 1.0);
  EXPECT_TRUE(std::isinf(z.tau.absorption_time()));
}

TEST(DiscreteLamperti, HalvingFromEight) {
  const TableKernel k = halving_table(8);
  Stream rng(1, 0);
  const ChainRunResult res = run_chain(k, {8, 1}, rng);
  const LampertiResult z = discrete_lamperti(res, 8, 1.0);
  // Value 2^{-k} is held for (1/8) * (2^{-k})^{-1} = 2^k / 8.
  EXPECT_EQ(z.g.times(), (std::vector<double>{0.0, 0.125, 0.375, 0.875, 1.875}));
  EXPECT_EQ(z.g.positions(), (std::vector<double>{1.0, 0.5, 0.25, 0.125, 0.0}));
  // The source clock ends at A_n / n^gamma.
  EXPECT_DOUBLE_EQ(z.tau.source_absorption_time(), res.absorption_time / 8.0);
  EXPECT_DOUBLE_EQ(z.tau(kInf), res.absorption_time / 8.0);
}

TEST(DiscreteLamperti, MatchesTransformOfRescaledPath) {
  const TableKernel k = halving_table(1000);
  Stream rng(1, 0);
  const ChainRunResult res = run_chain(k, {1000, 1}, rng);
  const LampertiResult a = discrete_lamperti(res, 1000, 0.5);
  const LampertiResult b = lamperti_time_change(rescale_path(res, 1000, 0.5), -0.5);
  EXPECT_EQ(a.g.times(), b.g.times());
  EXPECT_EQ(a.g.positions(), b.g.positions());
}

TEST(Glue, WithZeroTimeReturnsSecond) {
  const SteppedPath f({0.0, 1.0}, {1.0, 0.5}, {1, 2});
  const SteppedPath g = glue(f, f, 0.0);
  EXPECT_EQ(g.times(), f.times());
  EXPECT_EQ(g.positions(), f.positions());
}

TEST(Glue, IndicatorOfUnitInterval) {
  const SteppedPath g = glue(SteppedPath::constant(1.0, 1), SteppedPath::constant(0.0, 0), 1.0);
  EXPECT_EQ(g.times(), (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(g.positions(), (std::vector<double>{1.0, 0.0}));
}

TEST(GlueProperty, SplitRecoversOperands) {
  Stream rng(205, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const SteppedPath f = random_path(rng, false);
    const SteppedPath g = random_path(rng, trial % 2 == 0);
    const double t = 0.25 + 3.0 * rng.uniform();
    const SteppedPath h = glue(f, g, t);
    for (int k = 0; k < 40; ++k) {
      const double s = t * k / 40.0;
      ASSERT_EQ(h.position_at(s), f.position_at(s));
      ASSERT_EQ(h.type_at(s), f.type_at(s));
    }
    const SteppedPath tail = shifted(h, t);
    for (int k = 0; k < 40; ++k) {
      const double s = (g.last_time() + 1.0) * (k + 0.5) / 40.0;
      ASSERT_EQ(tail.position_at(s), g.position_at(s));
      ASSERT_EQ(tail.type_at(s), g.type_at(s));
    }
  }
}

}  // namespace
}  // namespace maplim
