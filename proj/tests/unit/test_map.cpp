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
#include <limits>
#include <sstream>
#include <vector>

#include "maplim/error.hpp"
#include "maplim/map.hpp"
#include "maplim/measures.hpp"

namespace maplim {
namespace {

MapCharacteristics drift_only(double c) {
  return MapCharacteristics::monotype(LaplaceExponent(0.0, c));
}

MapCharacteristics poisson_log2(double rate = 1.0) {
  const std::vector<Atom> y{{std::log(2.0), rate}};
  return MapCharacteristics::monotype(LaplaceExponent(0.0, 0.0, JumpMeasure::from_atoms(y)));
}

MapCharacteristics two_type(double c1, double c2, double l12, double l21) {
  MapCharacteristics m;
  m.kappa = 2;
  m.psi = {LaplaceExponent(0.0, c1), LaplaceExponent(0.0, c2)};
  m.lambda = {{0.0, l12}, {l21, 0.0}};
  m.switch_jumps = {{SwitchLaw(), SwitchLaw()}, {SwitchLaw(), SwitchLaw()}};
  return m;
}

struct MeanSe {
  double mean;
  double se;
};

MeanSe mean_se(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / (static_cast<double>(v.size()) * (v.size() - 1.0)))};
}

TEST(CheckNotConstant, DriftSingleType) {
  EXPECT_TRUE(check_not_constant(drift_only(1.0)).ok);
}

TEST(CheckNotConstant, ReachesMovingType) {
  const NonConstancy nc = check_not_constant(two_type(0.0, 1.0, 1.0, 0.0));
  EXPECT_TRUE(nc.ok);
}

TEST(CheckNotConstant, TrivialSingleType) {
  const NonConstancy nc = check_not_constant(MapCharacteristics::monotype(LaplaceExponent()));
  EXPECT_FALSE(nc.ok);
  EXPECT_EQ(nc.witness, 1);
}

TEST(CheckNotConstant, SwitchJumpCountsAsMotion) {
  MapCharacteristics m = two_type(0.0, 0.0, 1.0, 1.0);
  EXPECT_FALSE(check_not_constant(m).ok);
  m.switch_jumps[0][1] = SwitchLaw::dirac(0.5);
  EXPECT_TRUE(check_not_constant(m).ok);
  EXPECT_THROW(MapSimulator(two_type(0.0, 0.0, 1.0, 1.0)), ValidationError);
}

TEST(SimulateMap, DriftOnlyIsExact) {
  Stream rng(1, 0);
  const MapPath p = simulate_map(drift_only(1.5), 1, StopRule::horizon(4.0), 0.0, rng);
  EXPECT_EQ(p.status, PathStatus::kHorizon);
  EXPECT_DOUBLE_EQ(p.xi_end(), 6.0);
  EXPECT_DOUBLE_EQ(p.xi_at(2.0), 3.0);
}

TEST(SimulateMap, CompoundPoissonMean) {
  const MapSimulator sim(poisson_log2());
  std::vector<double> v;
  for (std::uint64_t r = 0; r < 100000; ++r) {
    Stream rng(2, r);
    v.push_back(sim.simulate(1, StopRule::horizon(1.0), rng).xi_end());
  }
  const MeanSe m = mean_se(v);
  EXPECT_LT(std::abs(m.mean - std::log(2.0)), 3.0 * m.se) << m.mean << " +- " << m.se;
}

TEST(SimulateMap, SymmetricFlipOccupation) {
  const MapSimulator sim(two_type(1.0, 1.0, 1.0, 1.0));
  Stream rng(3, 0);
  const MapPath p = sim.simulate(1, StopRule::horizon(1000.0), rng);
  double in_one = 0.0;
  for (std::size_t k = 0; k < p.segments.size(); ++k) {
    const double end = k + 1 < p.segments.size() ? p.segments[k + 1].time : p.end_time;
    if (p.segments[k].type == 1) in_one += end - p.segments[k].time;
  }
  EXPECT_NEAR(in_one / 1000.0, 0.5, 0.02);
}

TEST(SimulateMap, KillingEndsWithSentinel) {
  const MapSimulator sim(MapCharacteristics::monotype(LaplaceExponent(2.0, 0.0)));
  Stream rng(4, 0);
  const MapPath p = sim.simulate(1, StopRule::horizon(1e9), rng);
  EXPECT_TRUE(p.killed());
  EXPECT_TRUE(std::isinf(p.xi_end()));
  EXPECT_EQ(p.type_end(), 0);
}

TEST(SimulateMap, ZeroCutoffRejectedForInfiniteActivity) {
  const LaplaceExponent psi = laplace_exponent_from_measure(FiniteMeasure::lebesgue());
  EXPECT_THROW(MapSimulator(MapCharacteristics::monotype(psi), 0.0), ConfigurationError);
}

TEST(SimulateMap, EventBudgetRaisesRunaway) {
  const MapSimulator sim(poisson_log2(), -1.0, 10);
  Stream rng(5, 0);
  EXPECT_THROW(sim.simulate(1, StopRule::horizon(1e6), rng), RunawayError);
}

TEST(MapProperty, XiNondecreasingTypeConstantBetweenEvents) {
  MapCharacteristics m = two_type(0.5, 0.0, 1.0, 2.0);
  m.psi[1] = LaplaceExponent(0.0, 0.0, JumpMeasure::from_atoms(std::vector<Atom>{{0.3, 1.0}}));
  m.switch_jumps[1][0] = SwitchLaw::dirac(0.2);
  const MapSimulator sim(m);
  for (std::uint64_t r = 0; r < 200; ++r) {
    Stream rng(6, r);
    const MapPath p = sim.simulate(1 + static_cast<int>(r % 2), StopRule::horizon(20.0), rng);
    for (std::size_t k = 1; k < p.segments.size(); ++k) {
      const double before = p.segments[k - 1].xi +
                            p.segments[k - 1].slope * (p.segments[k].time - p.segments[k - 1].time);
      ASSERT_GE(p.segments[k].xi, before - 1e-12);
      ASSERT_GE(p.segments[k].time, p.segments[k - 1].time);
    }
  }
}

TEST(MapProperty, AsymptoticSlopeStabilizes) {
  MapCharacteristics m = two_type(0.2, 0.0, 0.5, 1.0);
  m.psi[1] = LaplaceExponent(0.0, 0.0, JumpMeasure::from_atoms(std::vector<Atom>{{1.0, 2.0}}));
  const MapSimulator sim(m);
  auto slope = [&](double t, std::uint64_t r) {
    Stream rng(7, r);
    const MapPath p = sim.simulate(1, StopRule::horizon(2.0 * t), rng);
    return (p.xi_at(2.0 * t) - p.xi_at(t)) / t;
  };
  const double s3 = slope(1e3, 0);
  const double s4 = slope(1e4, 1);
  // pi = (2/3, 1/3); slope 2/3 * 0.2 + 1/3 * 2 = 0.8.
  EXPECT_GT(s4, 0.5);
  EXPECT_NEAR(s3 / s4, 1.0, 0.1);
  EXPECT_NEAR(s4, 0.8, 0.05);
}

TEST(LampertiTransformMap, UnitDriftGammaOne) {
  Stream rng(8, 0);
  const MapPath p = simulate_map(drift_only(1.0), 1, StopRule::converged(1e-12, 1.0), 0.0, rng);
  const LampertiPath x = lamperti_transform_map(p, 1.0);
  for (double t : {0.0, 0.25, 0.5, 0.9}) EXPECT_NEAR(x.value_at(t), 1.0 - t, 1e-12);
  EXPECT_NEAR(x.absorption_time(), 1.0, 1e-11);
  EXPECT_EQ(x.value_at(1.5), 0.0);
  EXPECT_EQ(x.type_at(1.5), 0);
}

TEST(LampertiTransformMap, UnitDriftGammaTwo) {
  Stream rng(9, 0);
  const MapPath p = simulate_map(drift_only(1.0), 1, StopRule::converged(1e-12, 2.0), 0.0, rng);
  const LampertiPath x = lamperti_transform_map(p, 2.0);
  for (double t : {0.0, 0.1, 0.3, 0.45}) EXPECT_NEAR(x.value_at(t), std::sqrt(1.0 - 2.0 * t), 1e-12);
  EXPECT_EQ(x.value_at(0.6), 0.0);
}

TEST(LampertiTransformMap, PureKillingJumpsToZero) {
  Stream rng(10, 0);
  const MapSimulator sim(MapCharacteristics::monotype(LaplaceExponent(3.0, 0.0)));
  const MapPath p = sim.simulate(1, StopRule::converged(1e-12, 1.0), rng);
  ASSERT_TRUE(p.killed());
  const LampertiPath x = lamperti_transform_map(p, 1.0);
  EXPECT_DOUBLE_EQ(x.absorption_time(), p.end_time);
  EXPECT_EQ(x.value_at(0.999 * p.end_time), 1.0);
  EXPECT_EQ(x.value_at(p.end_time), 0.0);
}

TEST(ExponentialFunctional, DriftClosedForm) {
  Stream rng(11, 0);
  const MapSimulator sim(drift_only(2.0));
  const FunctionalEstimate f = exponential_functional(sim, 1, 0.5, 1e-12, rng);
  EXPECT_NEAR(f.value + f.residual, 1.0, 1e-11);
  EXPECT_LE(f.residual, 1e-12);
}

TEST(ExponentialFunctional, PoissonMeanIsTwo) {
  const MapSimulator sim(poisson_log2());
  std::vector<double> v;
  for (std::uint64_t r = 0; r < 100000; ++r) {
    Stream rng(12, r);
    const FunctionalEstimate f = exponential_functional(sim, 1, 1.0, 1e-10, rng);
    v.push_back(f.value + f.residual);
  }
  const MeanSe m = mean_se(v);
  EXPECT_LT(std::abs(m.mean - 2.0), 3.0 * m.se) << m.mean << " +- " << m.se;
}

TEST(ExponentialFunctional, PureKillingIsKillingTime) {
  const MapSimulator sim(MapCharacteristics::monotype(LaplaceExponent(4.0, 0.0)));
  std::vector<double> v;
  for (std::uint64_t r = 0; r < 20000; ++r) {
    Stream rng(13, r);
    const MapPath p = sim.simulate(1, StopRule::converged(1e-10, 1.0), rng);
    const FunctionalEstimate f = exponential_functional(p, 1.0);
    ASSERT_DOUBLE_EQ(f.value, p.end_time);
    ASSERT_EQ(f.residual, 0.0);
    v.push_back(f.value);
  }
  const MeanSe m = mean_se(v);
  EXPECT_LT(std::abs(m.mean - 0.25), 3.0 * m.se);
}

TEST(MomentOracle, Examples) {
  EXPECT_DOUBLE_EQ(moment_oracle(LaplaceExponent(0.0, 1.0), 1.0, 1), 1.0);
  EXPECT_DOUBLE_EQ(moment_oracle(LaplaceExponent(0.0, 1.0), 1.0, 4), 1.0);
  const LaplaceExponent psi = laplace_exponent_from_measure(FiniteMeasure::dirac(0.5, 0.5));
  EXPECT_NEAR(moment_oracle(psi, 1.0, 1), 2.0, 1e-13);
  EXPECT_NEAR(moment_oracle(psi, 1.0, 2), 16.0 / 3.0, 1e-13);
  EXPECT_THROW(moment_oracle(LaplaceExponent(), 1.0, 1), DegenerateError);
}

TEST(MomentVector, MonotypeMatchesOracle) {
  const LaplaceExponent psi = laplace_exponent_from_measure(FiniteMeasure::dirac(0.5, 0.5));
  const auto m = functional_moment_vector(MapCharacteristics::monotype(psi), 1.0);
  EXPECT_NEAR(m[0], 2.0, 1e-12);
}

TEST(MapProperty, OracleMatchesMonteCarloOnTwoTypeFixture) {
  MapCharacteristics m = two_type(1.0, 0.0, 1.0, 1.0);
  m.psi[1] = LaplaceExponent(0.0, 0.0, JumpMeasure::from_atoms(std::vector<Atom>{{std::log(2.0), 1.0}}));
  const MapSimulator sim(m);
  const double target = sim.moment_vector(1.0)[0];
  std::vector<double> v;
  for (std::uint64_t r = 0; r < 40000; ++r) {
    Stream rng(14, r);
    const FunctionalEstimate f = exponential_functional(sim, 1, 1.0, 1e-10, rng);
    v.push_back(f.value + f.residual);
  }
  const MeanSe ms = mean_se(v);
  EXPECT_LT(std::abs(ms.mean - target), 3.0 * ms.se) << ms.mean << " vs " << target;
}

TEST(MapProperty, ContinuousAbsorptionWithoutKilling) {
  // With no killing the transformed path creeps to 0: its value where the
  // simulation stops shrinks with the tolerance, for every small-jump cutoff.
  const LaplaceExponent psi = laplace_exponent_from_measure(FiniteMeasure::lebesgue());
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const MapSimulator sim(MapCharacteristics::monotype(psi), eps);
    double prev = std::numeric_limits<double>::infinity();
    for (double tol : {1e-3, 1e-6, 1e-9}) {
      double worst = 0.0;
      for (std::uint64_t r = 0; r < 200; ++r) {
        Stream rng(15, r);
        const MapPath p = sim.simulate(1, StopRule::converged(tol, 1.0), rng);
        ASSERT_FALSE(p.killed());
        worst = std::max(worst, std::exp(-p.xi_end()));
      }
      ASSERT_LT(worst, prev);
      ASSERT_LE(worst, 10.0 * tol);
      prev = worst;
    }
  }
}

TEST(MapPath, CsvHeader) {
  Stream rng(16, 0);
  const MapPath p = simulate_map(drift_only(1.0), 1, StopRule::horizon(1.0), 0.0, rng);
  std::ostringstream out;
  p.write_csv(out);
  EXPECT_EQ(out.str().rfind("time,xi,type,killed\n", 0), 0u);
}

}  // namespace
}  // namespace maplim
