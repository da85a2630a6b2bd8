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
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "maplim/diagnostics.hpp"
#include "maplim/error.hpp"
#include "maplim/experiment.hpp"
#include "maplim/map.hpp"
#include "maplim/measures.hpp"

namespace maplim {
namespace {

EmpiricalSample uniform_sample(std::size_t n, Stream& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform();
  return EmpiricalSample(std::move(v));
}

TEST(EmpiricalSample, SortsAndChecksProvenance) {
  const EmpiricalSample s({3.0, 1.0, 2.0});
  EXPECT_EQ(s.values(), (std::vector<double>{1.0, 2.0, 3.0}));
  EXPECT_DOUBLE_EQ(s.cdf(2.0), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.cdf(0.5), 0.0);
  EXPECT_THROW(EmpiricalSample({1.0, 2.0}, SeedProvenance{1, 0, 0, 3}), ValidationError);
  EXPECT_NO_THROW(EmpiricalSample({1.0, 2.0}, SeedProvenance{1, 0, 0, 2}));
}

TEST(KsDistance, IdenticalSamples) {
  const EmpiricalSample a({0.1, 0.5, 0.5, 2.0});
  EXPECT_EQ(ks_distance(a, a), 0.0);
}

TEST(KsDistance, DisjointSamples) {
  const EmpiricalSample zeros(std::vector<double>(50, 0.0));
  const EmpiricalSample ones(std::vector<double>(70, 1.0));
  EXPECT_EQ(ks_distance(zeros, ones), 1.0);
}

TEST(KsDistance, UniformAgainstCdf) {
  Stream rng(1, 0);
  const EmpiricalSample s = uniform_sample(10000, rng);
  const Cdf u = [](double x) { return std::clamp(x, 0.0, 1.0); };
  EXPECT_LT(ks_distance(s, u), 0.05);
}

TEST(KsDistance, EmptyInputThrows) {
  const EmpiricalSample a({1.0});
  EXPECT_THROW(ks_distance(EmpiricalSample(), a), ValidationError);
  EXPECT_THROW(ks_distance(EmpiricalSample(), Cdf([](double) { return 0.5; })),
               ValidationError);
}

TEST(KsProperty, SymmetricAndBounded) {
  Stream rng(2, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 40);
    const std::size_t m = 1 + static_cast<std::size_t>(rng.uniform() * 40);
    std::vector<double> a(n);
    std::vector<double> b(m);
    for (double& x : a) x = std::floor(rng.uniform() * 5.0);
    for (double& x : b) x = std::floor(rng.uniform() * 5.0) + 0.5 * (trial % 2);
    const EmpiricalSample sa(a);
    const EmpiricalSample sb(b);
    const double d = ks_distance(sa, sb);
    ASSERT_EQ(d, ks_distance(sb, sa));
    ASSERT_GE(d, 0.0);
    ASSERT_LE(d, 1.0);
  }
}

TEST(KsCriticalValue, OnePercentLevel) {
  EXPECT_NEAR(ks_critical_value(10000, 10000), 1.949 * std::sqrt(2e-4), 1e-12);
}

TEST(MomentEstimate, ConstantSample) {
  const EmpiricalSample s(std::vector<double>(20, 1.5));
  for (double a : {0.5, 1.0, 3.0}) {
    const MomentEstimate m = moment_estimate(s, a);
    EXPECT_DOUBLE_EQ(m.value, std::pow(1.5, a));
    EXPECT_EQ(m.std_error, 0.0);
  }
}

TEST(MomentEstimate, ZeroOrder) {
  const EmpiricalSample s({0.2, 4.0, 7.0});
  const MomentEstimate m = moment_estimate(s, 0.0);
  EXPECT_EQ(m.value, 1.0);
  EXPECT_EQ(m.std_error, 0.0);
}

TEST(MomentEstimate, ExponentialSecondMoment) {
  Stream rng(3, 0);
  std::vector<double> v(100000);
  for (double& x : v) x = rng.exponential(1.0);
  const MomentEstimate m = moment_estimate(EmpiricalSample(std::move(v)), 2.0);
  EXPECT_GT(m.std_error, 0.0);
  EXPECT_LT(std::abs(m.value - 2.0), 3.0 * m.std_error);
}

TEST(MomentEstimate, SingleObservationHasNoError) {
  const MomentEstimate m = moment_estimate(EmpiricalSample({2.0}), 1.0);
  EXPECT_EQ(m.value, 2.0);
  EXPECT_TRUE(std::isnan(m.std_error));
}

TEST(MomentEstimate, RejectsBadInput) {
  EXPECT_THROW(moment_estimate(EmpiricalSample(), 1.0), ValidationError);
  EXPECT_THROW(moment_estimate(EmpiricalSample({1.0}), -1.0), ValidationError);
}

TEST(OccupationMeasure, ConstantType) {
  const SteppedPath p({0.0, 3.0}, {1.0, 0.0}, {1, 1});
  EXPECT_EQ(occupation_measure(p, 0.05, 3), (std::vector<double>{1.0, 0.0, 0.0}));
}

TEST(OccupationMeasure, AlternatingEqualIntervals) {
  SteppedPath p;
  for (int k = 0; k < 10; ++k) p.push(k, 1.0 - 0.01 * k, 1 + k % 2);
  p.push(10.0, 0.0, 1);
  const std::vector<double> occ = occupation_measure(p, 0.05, 2);
  EXPECT_DOUBLE_EQ(occ[0], 0.5);
  EXPECT_DOUBLE_EQ(occ[1], 0.5);
}

TEST(OccupationMeasure, StartsBelowEps) {
  const SteppedPath p({0.0, 1.0}, {0.01, 0.0}, {1, 1});
  EXPECT_THROW(occupation_measure(p, 0.05, 1), DegenerateError);
}

// Rate-1 symmetric flip chain; the position decreases linearly to 0 at the
// horizon so that only the horizon ends the window.
SteppedPath flip_path(double horizon, Stream& rng) {
  SteppedPath p;
  double t = 0.0;
  int type = 1;
  while (true) {
    p.push(t, 1.0 - t / horizon, type);
    t += rng.exponential(1.0);
    if (t >= horizon) break;
    type = 3 - type;
  }
  p.push(horizon, 0.0, type);
  return p;
}

TEST(OccupationMeasure, SymmetricFlipChain) {
  // A single path over 1e3 has sd 1/sqrt(4e3) ~ 0.016, so average 20 paths.
  double mean = 0.0;
  const int paths = 20;
  for (int r = 0; r < paths; ++r) {
    Stream rng(4, static_cast<std::uint64_t>(r));
    mean += occupation_measure(flip_path(1e3, rng), 1e-9, 2)[0] / paths;
  }
  EXPECT_NEAR(mean, 0.5, 0.02);
}

TEST(OccupationProperty, NonNegativeAndNormalized) {
  for (std::uint64_t r = 0; r < 100; ++r) {
    Stream rng(5, r);
    SteppedPath p;
    double t = 0.0;
    double x = 1.0;
    while (x > 0.01) {
      p.push(t, x, 1 + static_cast<int>(rng.uniform() * 3));
      t += rng.exponential(1.0);
      x *= rng.uniform();
    }
    p.push(t, x, 1);
    const std::vector<double> occ = occupation_measure(p, 0.01 + 0.5 * rng.uniform(), 3);
    double s = 0.0;
    for (double v : occ) {
      ASSERT_GE(v, 0.0);
      s += v;
    }
    ASSERT_NEAR(s, 1.0, 1e-12);
  }
}

MapCharacteristics drift_only(double c) {
  return MapCharacteristics::monotype(LaplaceExponent(0.0, c));
}

MapCharacteristics drift_and_jumps() {
  const std::vector<Atom> y{{std::log(2.0), 1.0}};
  return MapCharacteristics::monotype(LaplaceExponent(0.0, 0.5, JumpMeasure::from_atoms(y)));
}

TEST(SelfSimilarity, UnitScaleMatchesItself) {
  Stream rng(6, 0);
  EXPECT_LT(self_similarity_check(drift_and_jumps(), 1.0, 1.0, 0.5, 10000, rng), 0.03);
}

TEST(SelfSimilarity, PureDriftIsExact) {
  Stream rng(7, 0);
  EXPECT_EQ(self_similarity_check(drift_only(1.0), 1.0, 0.5, 0.25, 100, rng), 0.0);
}

TEST(SelfSimilarity, WrongIndexIsDetected) {
  Stream rng(8, 0);
  EXPECT_EQ(self_similarity_check(drift_only(1.0), 1.0, 0.5, 0.25, 100, rng, 2.0), 1.0);
}

TEST(SelfSimilarity, JumpsAtSmallScale) {
  Stream rng(9, 0);
  EXPECT_LT(self_similarity_check(drift_and_jumps(), 0.5, 0.3, 0.4, 10000, rng), 0.03);
}

TEST(SelfSimilarity, RejectsNonPositiveScale) {
  Stream rng(10, 0);
  EXPECT_THROW(self_similarity_check(drift_only(1.0), 1.0, 0.0, 0.25, 10, rng),
               ValidationError);
}

TEST(ConvergenceReport, GridMustIncrease) {
  ConvergenceReport r;
  r.n_grid = {4, 4};
  EXPECT_THROW(r.validate(), ValidationError);
  r.n_grid = {4, 8};
  EXPECT_NO_THROW(r.validate());
}

TEST(ConvergenceReport, CsvCarriesHash) {
  ConvergenceReport r;
  r.fixture = "f";
  r.config_hash = "0123456789abcdef";
  r.rows.push_back({8, "mean", 1.0, 0.1, 1.0, 0.3, GateTier::kStatistical, GateOutcome::kPass});
  std::ostringstream out;
  r.write_csv(out);
  EXPECT_EQ(out.str(),
            "# config_hash: 0123456789abcdef\n"
            "fixture,n,statistic,value,target,tolerance,pass\n"
            "f,8,mean,1,1,0.3,pass\n");
}

TEST(ChainExperiment, IdentityKernelRejected) {
  ChainExperiment exp;
  exp.kernel = std::make_shared<TableKernel>(TableKernel::identity(1, 64));
  exp.n_grid = {16, 64};
  exp.absorption_target = 1.0;
  EXPECT_THROW(exp.validate(), HypothesisViolation);
}

TEST(ChainExperiment, HalvingReportPassesAndReproduces) {
  const ExperimentConfig config = ExperimentConfig::from_json(
      {{"fixture", "halving-monotype"}, {"seed", 5}, {"n_grid", {256, 1024}},
       {"replicates", 2000}, {"limit_replicates", 2000}});
  ChainExperiment exp = build_experiment(config).chain;
  const ConvergenceReport a = convergence_report(exp);
  exp.jobs = 2;
  const ConvergenceReport b = convergence_report(exp);
  EXPECT_EQ(a.seed, 5u);
  int means = 0;
  for (const ReportRow& row : a.rows) {
    if (row.statistic != "absorption_mean") continue;
    ++means;
    EXPECT_EQ(row.target, 2.0);
    EXPECT_EQ(row.outcome, GateOutcome::kPass) << row.n;
    EXPECT_LE(std::abs(row.value - 2.0), 3.0 * row.std_error) << row.n;
  }
  EXPECT_EQ(means, 2);
  std::ostringstream ca;
  std::ostringstream cb;
  a.write_csv(ca);
  b.write_csv(cb);
  EXPECT_EQ(ca.str(), cb.str());
}

}  // namespace
}  // namespace maplim
