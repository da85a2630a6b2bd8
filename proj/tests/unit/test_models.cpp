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
#include <memory>
#include <numbers>
#include <vector>

#include "maplim/chain.hpp"
#include "maplim/error.hpp"
#include "maplim/models.hpp"

namespace maplim {
namespace {

double row_sum(const std::vector<RowEntry>& row) {
  double s = 0.0;
  for (const RowEntry& e : row) s += e.p;
  return s;
}

double row_mass_at(const std::vector<RowEntry>& row, std::int64_t m) {
  double s = 0.0;
  for (const RowEntry& e : row) s += e.position == m ? e.p : 0.0;
  return s;
}

CoalescentEnvSpec single_env(FiniteMeasure lambda, double gamma = 0.5) {
  CoalescentEnvSpec spec;
  spec.lambda = {std::move(lambda)};
  spec.gamma = gamma;
  return spec;
}

BarrierWalkSpec one_type(IncrementLaw law) {
  return {{{1.0}}, {{std::move(law)}}};
}

TEST(ScaledJumpLaw, RowAndMoveProbability) {
  const ScaledJumpLaw law(0.5, 1.0, 1.0);
  const auto row = law.row(10);
  ASSERT_EQ(row.size(), 2u);
  EXPECT_DOUBLE_EQ(law.move_probability(10), 0.1);
  EXPECT_EQ(law.target(10), 5);
  EXPECT_EQ(law.move_probability(0), 0.0);
  EXPECT_TRUE(law.is_absorbing(0));
  EXPECT_THROW(ScaledJumpLaw(1.0, 1.0, 1.0), ValidationError);
}

TEST(TypeMatrixFamily, PerturbedRowsAreStochastic) {
  const TypeMatrixFamily f = TypeMatrixFamily::perturbed(QMatrix({{-3.0, 3.0}, {1.0, -1.0}}), 0.5);
  for (std::int64_t n : {1, 2, 10, 1000000}) {
    const auto p = f.at(n);
    for (const auto& r : p) {
      EXPECT_NEAR(r[0] + r[1], 1.0, 1e-15);
      EXPECT_GE(r[0], 0.0);
      EXPECT_GE(r[1], 0.0);
    }
    EXPECT_NEAR(f.leave(n, 1), 1.0 - f.entry(n, 1, 1), 1e-15);
  }
  EXPECT_NEAR(f.entry(1000000, 1, 2), 3.0 * 1e-3, 1e-15);
  EXPECT_DOUBLE_EQ(f.leave(std::int64_t{1} << 40, 2), std::pow(2.0, -20.0));
}

TEST(CoalescentKernel, TotalCoalescence) {
  const auto k = coalescent_kernel(single_env(FiniteMeasure::dirac(1.0)));
  for (std::int64_t n : {2, 3, 10, 1000}) {
    const auto row = k->row({n, 1});
    EXPECT_NEAR(row_mass_at(row, 1), 1.0, 1e-14) << n;
  }
}

TEST(CoalescentKernel, LebesgueThreeBlocks) {
  const auto k = coalescent_kernel(single_env(FiniteMeasure::lebesgue()));
  const auto row = k->row({3, 1});
  EXPECT_NEAR(row_mass_at(row, 1), 0.25, 1e-14);
  EXPECT_NEAR(row_mass_at(row, 2), 0.75, 1e-14);
  const auto* law = dynamic_cast<const CoalescentPositionLaw*>(&k->law(1));
  ASSERT_NE(law, nullptr);
  EXPECT_NEAR(law->total_rate(3), 2.0, 1e-14);
}

TEST(CoalescentKernel, RejectsMassAtZero) {
  EXPECT_THROW(coalescent_kernel(single_env(FiniteMeasure::dirac(0.0))), ValidationError);
}

TEST(CoalescentProperty, RowsNormalizeAndStrictlyDecrease) {
  Stream rng(1, 0);
  std::vector<CoalescentEnvSpec> specs{
      single_env(FiniteMeasure::beta(1.5, 0.5)),
      single_env(FiniteMeasure::lebesgue()),
      single_env(FiniteMeasure({{0.3, 0.5}, {1.0, 0.1}}, Density::beta(2.0, 0.7, 0.4)))};
  for (int k = 0; k < 3; ++k) {
    specs.push_back(single_env(
        FiniteMeasure::beta(0.2 + 2.0 * rng.uniform(), 0.2 + 2.0 * rng.uniform(), 0.5 + rng.uniform())));
  }
  for (const CoalescentEnvSpec& spec : specs) {
    const auto kernel = coalescent_kernel(spec);
    for (std::int64_t n : {2, 3, 7, 50, 999, 10000}) {
      const auto row = kernel->row({n, 1});
      ASSERT_NEAR(row_sum(row), 1.0, 1e-10) << n;
      for (const RowEntry& e : row) {
        if (e.p > 0.0) {
          ASSERT_GE(e.position, 1);
          ASSERT_LE(e.position, n - 1);
        }
      }
      Stream s(2, static_cast<std::uint64_t>(n));
      for (int t = 0; t < 50; ++t) ASSERT_LT(kernel->sample({n, 1}, s).position, n);
    }
  }
}

TEST(CoalescentProperty, SampledLawMatchesRow) {
  const auto kernel = coalescent_kernel(single_env(FiniteMeasure::beta(1.5, 0.5)));
  const std::int64_t n = 40;
  const auto row = kernel->row({n, 1});
  std::vector<double> counts(n, 0.0);
  const int draws = 200000;
  Stream rng(3, 0);
  for (int t = 0; t < draws; ++t) counts[kernel->sample({n, 1}, rng).position] += 1.0;
  for (const RowEntry& e : row) {
    const double se = std::sqrt(e.p * (1.0 - e.p) / draws);
    ASSERT_NEAR(counts[e.position] / draws, e.p, 5.0 * se + 1e-12) << e.position;
  }
}

TEST(TailConstant, BetaIdentity) {
  const TailEstimate t = tail_constant(FiniteMeasure::beta(1.5, 0.5), 0.5);
  EXPECT_TRUE(t.regular);
  EXPECT_NEAR(t.c, 4.0 / std::numbers::pi, 0.01 * 4.0 / std::numbers::pi);
}

TEST(TailConstant, AtomIsFlagged) {
  const TailEstimate t = tail_constant(FiniteMeasure::dirac(0.5), 0.5);
  EXPECT_FALSE(t.regular);
}

TEST(TailConstant, LebesgueIsFlagged) {
  const TailEstimate t = tail_constant(FiniteMeasure::lebesgue(), 0.5);
  EXPECT_FALSE(t.regular);
}

TEST(CoalescentLimitPsi, BetaValue) {
  const LaplaceExponent psi =
      coalescent_limit_psi(FiniteMeasure::beta(1.5, 0.5), 0.5, 4.0 / std::numbers::pi);
  EXPECT_EQ(psi(0.0), 0.0);
  EXPECT_NEAR(psi(1.0), std::sqrt(std::numbers::pi), 1e-6);
}

TEST(CoalescentLimitPsi, MonotoneOnRandomMeasures) {
  Stream rng(4, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const double g = 0.2 + 0.6 * rng.uniform();
    const FiniteMeasure lambda = FiniteMeasure::beta(2.0 - g, g, 0.5 + rng.uniform());
    const LaplaceExponent psi = coalescent_limit_psi(lambda, g, 1.0);
    EXPECT_EQ(psi(0.0), 0.0);
    double prev = 0.0;
    for (double q : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
      const double v = psi(q);
      ASSERT_GT(v, prev);
      prev = v;
    }
  }
}

TEST(CoalescentLimit, MonotypeUsesPsi) {
  const MapCharacteristics m = coalescent_limit(single_env(FiniteMeasure::beta(1.5, 0.5)));
  EXPECT_EQ(m.kappa, 1);
  EXPECT_NEAR(m.psi[0](1.0), std::sqrt(std::numbers::pi), 1e-6);
}

TEST(CoalescentLimit, IrregularTailIsHypothesisViolation) {
  EXPECT_THROW(coalescent_limit(single_env(FiniteMeasure::dirac(0.5))), HypothesisViolation);
}

TEST(CountCollisions, TwoBlocksMergeOnce) {
  const CoalescentEnvSpec spec = single_env(FiniteMeasure::beta(1.5, 0.5));
  for (std::uint64_t r = 0; r < 20; ++r) {
    Stream rng(5, r);
    EXPECT_EQ(count_collisions(spec, 2, 1, rng).collisions, 1);
  }
}

TEST(CountCollisions, TotalCoalescenceIsOneCollision) {
  const CoalescentEnvSpec spec = single_env(FiniteMeasure::dirac(1.0));
  Stream rng(6, 0);
  const CollisionCount c = count_collisions(spec, 5000, 1, rng);
  EXPECT_EQ(c.collisions, 1);
  EXPECT_EQ(c.blocks.positions().back(), 1.0);
}

TEST(CountCollisions, SameSeedSameCount) {
  const CoalescentEnvSpec spec = single_env(FiniteMeasure::beta(1.5, 0.5));
  Stream a(7, 3);
  Stream b(7, 3);
  EXPECT_EQ(count_collisions(spec, 3000, 1, a).collisions,
            count_collisions(spec, 3000, 1, b).collisions);
}

TEST(IncrementLaw, GeometricAndPolynomialAndTable) {
  const IncrementLaw g = IncrementLaw::geometric(0.25);
  EXPECT_NEAR(g.pmf(1), 0.25, 1e-15);
  EXPECT_NEAR(g.tail(3), std::pow(0.75, 3), 1e-15);
  EXPECT_NEAR(g.mean(), 4.0, 1e-15);
  EXPECT_NEAR(g.prob_between(1, 3) + g.tail(3), 1.0, 1e-15);
  const IncrementLaw p = IncrementLaw::polynomial_tail(2.0);
  EXPECT_NEAR(p.tail(3), 1.0 / 16.0, 1e-15);
  EXPECT_NEAR(p.mean(), std::numbers::pi * std::numbers::pi / 6.0, 1e-12);
  EXPECT_TRUE(std::isinf(IncrementLaw::polynomial_tail(0.5).mean()));
  EXPECT_EQ(IncrementLaw::polynomial_tail(0.5).tail_limit(0.5), 1.0);
  const IncrementLaw t = IncrementLaw::table({0.0, 0.5, 0.0, 0.5});
  EXPECT_NEAR(t.mean(), 2.0, 1e-15);
  EXPECT_EQ(t.tail(3), 0.0);
  EXPECT_THROW(IncrementLaw::table({0.5, 0.4}), ValidationError);
}

TEST(IncrementLaw, ConditionalSamplesStayInRange) {
  Stream rng(8, 0);
  for (const IncrementLaw& law : {IncrementLaw::geometric(0.1), IncrementLaw::polynomial_tail(0.5),
                                  IncrementLaw::table({0.1, 0.2, 0.3, 0.4})}) {
    for (int t = 0; t < 2000; ++t) {
      const std::int64_t v = law.sample_between(1, 2, rng);
      ASSERT_GE(v, 1);
      ASSERT_LE(v, 2);
    }
  }
}

TEST(BarrierWalkKernel, SingleAdmissibleJump) {
  const BarrierWalkKernel k(one_type(IncrementLaw::geometric(0.5)));
  const auto row = k.row({1, 1});
  EXPECT_NEAR(row_mass_at(row, 0), 1.0, 1e-15);
  EXPECT_TRUE(k.is_absorbing(0));
}

TEST(BarrierWalkKernel, TooLargeIncrementsOnlyMoveType) {
  BarrierWalkSpec spec;
  spec.p = {{0.5, 0.5}, {0.5, 0.5}};
  const IncrementLaw big = IncrementLaw::table({0.0, 0.0, 0.0, 0.0, 0.0, 1.0});
  spec.increments = {{big, big}, {big, IncrementLaw::geometric(0.5)}};
  const BarrierWalkKernel k(spec);
  const auto row = k.row({3, 1});
  ASSERT_EQ(row.size(), 2u);
  for (const RowEntry& e : row) {
    EXPECT_EQ(e.position, 3);
    EXPECT_DOUBLE_EQ(e.p, 0.5);
  }
  EXPECT_NEAR(k.leave_probability({3, 1}), 0.5, 1e-15);
}

TEST(BarrierWalkKernel, RejectsBadSpecs) {
  BarrierWalkSpec spec;
  spec.p = {{0.5, 0.4}, {0.5, 0.5}};
  spec.increments = {{IncrementLaw::geometric(0.5), IncrementLaw::geometric(0.5)},
                     {IncrementLaw::geometric(0.5), IncrementLaw::geometric(0.5)}};
  EXPECT_THROW(BarrierWalkKernel{spec}, ValidationError);
  spec.p = {{1.0, 0.0}, {0.5, 0.5}};
  EXPECT_THROW(BarrierWalkKernel{spec}, StructuralError);
}

TEST(BarrierProperty, PathsNonIncreasingAndNonNegative) {
  BarrierWalkSpec spec;
  spec.p = {{0.7, 0.3}, {0.3, 0.7}};
  spec.increments = {{IncrementLaw::geometric(0.5), IncrementLaw::polynomial_tail(0.7)},
                     {IncrementLaw::table({0.2, 0.3, 0.5}), IncrementLaw::geometric(0.25)}};
  const BarrierWalkKernel k(spec);
  EXPECT_NO_THROW(validate_kernel(k, {0, 1, 2, 3, 10, 100}));
  for (std::uint64_t r = 0; r < 200; ++r) {
    Stream rng(9, r);
    const ChainRunResult res = run_chain(k, {500, 1 + static_cast<int>(r % 2)}, rng);
    ASSERT_TRUE(res.path.non_increasing());
    for (double v : res.path.positions()) ASSERT_GE(v, 0.0);
    ASSERT_EQ(res.final_state.position, 0);
  }
}

TEST(BarrierLimit, HeavyTailUnitValue) {
  const BarrierWalkSpec spec = one_type(IncrementLaw::polynomial_tail(0.5));
  const LaplaceExponent psi = barrier_limit(spec, HeavyTailMode{{1.0}, 0.5});
  EXPECT_NEAR(psi(1.0), 1.0, 1e-8);
  EXPECT_EQ(psi(0.0), 0.0);
  EXPECT_EQ(barrier_tail_constants(spec, 0.5), std::vector<double>{1.0});
}

TEST(BarrierLimit, FiniteMeanSingleType) {
  const FiniteMeanLimit l = barrier_limit(one_type(IncrementLaw::geometric(0.5)));
  EXPECT_DOUBLE_EQ(l.m_sum, 2.0);
  EXPECT_DOUBLE_EQ(l.absorption_sum, 0.5);
  EXPECT_DOUBLE_EQ(l.m_weighted, 2.0);
  EXPECT_DOUBLE_EQ(l.absorption_weighted, 0.5);
}

TEST(BarrierLimit, FiniteMeanTwoTypesReportsBothConstants) {
  BarrierWalkSpec spec;
  spec.p = {{0.7, 0.3}, {0.3, 0.7}};
  spec.increments = {{IncrementLaw::geometric(0.5), IncrementLaw::geometric(0.5)},
                     {IncrementLaw::geometric(0.25), IncrementLaw::geometric(0.25)}};
  const FiniteMeanLimit l = barrier_limit(spec);
  EXPECT_NEAR(l.m_sum, 6.0, 1e-14);
  EXPECT_NEAR(l.m_weighted, 3.0, 1e-14);
  EXPECT_NEAR(l.absorption_weighted, 1.0 / 3.0, 1e-14);
}

}  // namespace
}  // namespace maplim
