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
#include <numbers>
#include <vector>

#include "maplim/error.hpp"
#include "maplim/measures.hpp"
#include "maplim/rng.hpp"

namespace maplim {
namespace {

FiniteMeasure random_measure(Stream& rng) {
  std::vector<Atom> atoms;
  if (rng.bernoulli(0.3)) atoms.push_back({0.0, rng.uniform()});
  if (rng.bernoulli(0.3)) atoms.push_back({1.0, rng.uniform()});
  const int interior = static_cast<int>(rng.uniform() * 3.0);
  for (int k = 0; k < interior; ++k) atoms.push_back({0.05 + 0.9 * rng.uniform(), rng.uniform()});
  std::optional<Density> d;
  if (rng.bernoulli(0.6)) d = Density::beta(0.3 + 2.0 * rng.uniform(), 0.3 + 2.0 * rng.uniform(),
                                            rng.uniform());
  if (atoms.empty() && !d) atoms.push_back({0.5, 1.0});
  return FiniteMeasure(atoms, d);
}

std::vector<std::vector<double>> random_irreducible_q(int kappa, Stream& rng) {
  std::vector<std::vector<double>> q(kappa, std::vector<double>(kappa, 0.0));
  for (int i = 0; i < kappa; ++i) {
    // A cycle keeps the chain irreducible; extra edges are random.
    q[i][(i + 1) % kappa] = 0.1 + rng.uniform();
    for (int j = 0; j < kappa; ++j) {
      if (j != i && j != (i + 1) % kappa && rng.bernoulli(0.4)) q[i][j] = 3.0 * rng.uniform();
    }
    double s = 0.0;
    for (int j = 0; j < kappa; ++j) s += j == i ? 0.0 : q[i][j];
    q[i][i] = -s;
  }
  return q;
}

TEST(FiniteMeasure, TotalMassSumsAtomsAndDensity) {
  const FiniteMeasure mu({{0.0, 0.25}, {0.5, 0.5}}, Density::beta(2.0, 3.0, 2.0));
  EXPECT_NEAR(mu.total_mass(), 2.75, 1e-12);
  EXPECT_DOUBLE_EQ(mu.atom_mass(0.0), 0.25);
  EXPECT_DOUBLE_EQ(mu.atom_mass(0.3), 0.0);
  EXPECT_NEAR(mu.open_mass(), 2.5, 1e-12);
}

TEST(FiniteMeasure, RejectsInvalidAtoms) {
  EXPECT_THROW(FiniteMeasure({{1.5, 1.0}}), ValidationError);
  EXPECT_THROW(FiniteMeasure({{0.5, -1.0}}), ValidationError);
  EXPECT_THROW(FiniteMeasure({{0.5, 1.0}, {0.5, 2.0}}), ValidationError);
}

TEST(FiniteMeasure, IntegrateMatchesBetaMean) {
  const FiniteMeasure mu = FiniteMeasure::beta(2.0, 3.0);
  EXPECT_NEAR(mu.integrate([](double x, double) { return x; }), 0.4, 1e-10);
}

TEST(LaplaceExponent, AtomAtZeroIsPureKilling) {
  const LaplaceExponent psi = laplace_exponent_from_measure(FiniteMeasure::dirac(0.0));
  for (double q : {0.0, 0.5, 3.0}) EXPECT_DOUBLE_EQ(psi(q), 1.0);
}

TEST(LaplaceExponent, AtomAtOneIsPureDrift) {
  const LaplaceExponent psi = laplace_exponent_from_measure(FiniteMeasure::dirac(1.0));
  for (double q : {0.0, 0.5, 3.0}) EXPECT_DOUBLE_EQ(psi(q), q);
}

TEST(LaplaceExponent, HalfAtHalf) {
  const LaplaceExponent psi = laplace_exponent_from_measure(FiniteMeasure::dirac(0.5, 0.5));
  EXPECT_NEAR(psi(1.0), 0.5, 1e-14);
  EXPECT_NEAR(psi(2.0), 0.75, 1e-14);
  EXPECT_NEAR(psi(3.7), 1.0 - std::pow(2.0, -3.7), 1e-14);
}

TEST(LaplaceExponent, Lebesgue) {
  const LaplaceExponent psi = laplace_exponent_from_measure(FiniteMeasure::lebesgue());
  EXPECT_NEAR(psi(2.0), 1.5, 1e-10);
  // int_0^1 (1 - x^q) / (1 - x) dx is the harmonic number H_q.
  EXPECT_NEAR(psi(3.0), 1.0 + 0.5 + 1.0 / 3.0, 1e-10);
}

TEST(LaplaceExponent, MixtureCombinesTriplets) {
  const std::vector<LaplaceExponent> parts{LaplaceExponent(0.0, 1.0), LaplaceExponent(1.0, 0.0)};
  const std::vector<double> w{0.5, 0.5};
  const LaplaceExponent psi = LaplaceExponent::mixture(w, parts);
  EXPECT_NEAR(psi(3.0), 2.0, 1e-14);
}

TEST(LaplaceExponentProperty, ZeroValueMonotoneConcave) {
  Stream rng(101, 0);
  for (int trial = 0; trial < 25; ++trial) {
    const FiniteMeasure mu = random_measure(rng);
    const LaplaceExponent psi = laplace_exponent_from_measure(mu);
    ASSERT_EQ(psi(0.0), mu.atom_mass(0.0));
    std::vector<double> v;
    for (int k = 0; k < 64; ++k) v.push_back(psi(20.0 * k / 63.0));
    const double tol = 1e-9 * (1.0 + std::abs(v.back()));
    for (int k = 1; k < 64; ++k) ASSERT_GE(v[k], v[k - 1] - tol) << "trial " << trial;
    for (int k = 1; k + 1 < 64; ++k) {
      ASSERT_LE(v[k - 1] + v[k + 1] - 2.0 * v[k], tol) << "trial " << trial << " k " << k;
    }
    // psi(q) >= c q.
    for (int k = 0; k < 64; ++k) ASSERT_GE(v[k], mu.atom_mass(1.0) * 20.0 * k / 63.0 - tol);
  }
}

TEST(Pushforward, HalfAtHalfReweighted) {
  const Pushforward p = pushforward_neglog(FiniteMeasure::dirac(0.5, 0.5), true);
  const std::vector<Atom> y = p.measure.y_atoms();
  ASSERT_EQ(y.size(), 1u);
  EXPECT_NEAR(y[0].x, std::log(2.0), 1e-15);
  EXPECT_NEAR(y[0].mass, 1.0, 1e-15);
  EXPECT_FALSE(p.infinite);
  EXPECT_NEAR(p.total_mass, 1.0, 1e-15);
}

TEST(Pushforward, EmptyMeasure) {
  const Pushforward p = pushforward_neglog(FiniteMeasure(), true);
  EXPECT_TRUE(p.measure.empty());
  EXPECT_EQ(p.total_mass, 0.0);
}

TEST(Pushforward, LebesgueReweightedIsInfiniteActivity) {
  const Pushforward p = pushforward_neglog(FiniteMeasure::lebesgue(), true);
  EXPECT_TRUE(p.infinite);
  EXPECT_TRUE(std::isinf(p.total_mass));
  const Pushforward q = pushforward_neglog(FiniteMeasure::lebesgue(), false);
  EXPECT_FALSE(q.infinite);
  EXPECT_NEAR(q.total_mass, 1.0, 1e-10);
}

TEST(Pushforward, RejectsEndpointAtoms) {
  EXPECT_THROW(pushforward_neglog(FiniteMeasure::dirac(0.0), true), Error);
  EXPECT_THROW(pushforward_neglog(FiniteMeasure::dirac(1.0), false), Error);
}

TEST(PushforwardProperty, AtomsRoundTrip) {
  Stream rng(102, 0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Atom> atoms;
    const int k = 1 + static_cast<int>(rng.uniform() * 5.0);
    for (int a = 0; a < k; ++a) atoms.push_back({0.001 + 0.998 * rng.uniform(), rng.uniform() + 0.01});
    const FiniteMeasure mu(atoms);
    const std::vector<Atom> y = pushforward_neglog(mu, false).measure.y_atoms();
    ASSERT_EQ(y.size(), atoms.size());
    for (const Atom& a : y) {
      const double x = std::exp(-a.x);
      bool found = false;
      for (const Atom& b : atoms) found = found || (std::abs(b.x - x) < 1e-12 && std::abs(b.mass - a.mass) < 1e-12);
      ASSERT_TRUE(found);
    }
  }
}

TEST(QMatrix, RejectsBadRows) {
  EXPECT_THROW(QMatrix({{-1.0, 0.5}, {1.0, -1.0}}), ValidationError);
  EXPECT_THROW(QMatrix({{1.0, -1.0}, {1.0, -1.0}}), ValidationError);
}

TEST(Stationary, Symmetric) {
  const auto pi = stationary_distribution(QMatrix({{-1.0, 1.0}, {1.0, -1.0}}));
  EXPECT_NEAR(pi[0], 0.5, 1e-14);
  EXPECT_NEAR(pi[1], 0.5, 1e-14);
}

TEST(Stationary, Asymmetric) {
  const auto pi = stationary_distribution(QMatrix({{-2.0, 2.0}, {1.0, -1.0}}));
  EXPECT_NEAR(pi[0], 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(pi[1], 2.0 / 3.0, 1e-14);
}

TEST(Stationary, CyclicThree) {
  const auto pi = stationary_distribution(
      QMatrix({{-1.0, 1.0, 0.0}, {0.0, -1.0, 1.0}, {1.0, 0.0, -1.0}}));
  for (double p : pi) EXPECT_NEAR(p, 1.0 / 3.0, 1e-14);
}

TEST(Stationary, ReducibleNamesPair) {
  try {
    stationary_distribution(QMatrix({{0.0, 0.0}, {1.0, -1.0}}));
    FAIL() << "expected StructuralError";
  } catch (const StructuralError& e) {
    EXPECT_EQ(e.from(), 1);
    EXPECT_EQ(e.to(), 2);
  }
}

TEST(StationaryProperty, RandomIrreducibleBalance) {
  Stream rng(103, 0);
  for (int kappa = 1; kappa <= 8; ++kappa) {
    for (int trial = 0; trial < 20; ++trial) {
      const QMatrix q(random_irreducible_q(kappa, rng));
      ASSERT_TRUE(q.irreducible());
      const auto pi = stationary_distribution(q);
      double total = 0.0;
      for (double p : pi) {
        ASSERT_GT(p, 0.0);
        total += p;
      }
      ASSERT_NEAR(total, 1.0, 1e-12);
      for (int j = 1; j <= kappa; ++j) {
        double r = 0.0;
        for (int i = 1; i <= kappa; ++i) r += pi[i - 1] * q.rate(i, j);
        ASSERT_LE(std::abs(r), 1e-10);
      }
    }
  }
}

TEST(JumpSampler, FiniteAtomsExact) {
  const std::vector<Atom> y{{std::log(2.0), 1.0}};
  const JumpSampler s(JumpMeasure::from_atoms(y), 0.0);
  EXPECT_NEAR(s.rate(), 1.0, 1e-15);
  Stream rng(104, 0);
  EXPECT_NEAR(s.sample(rng), std::log(2.0), 1e-15);
}

TEST(JumpSampler, InfiniteActivityNeedsCutoff) {
  const JumpMeasure pi = pushforward_neglog(FiniteMeasure::lebesgue(), true).measure;
  EXPECT_THROW(JumpSampler(pi, 0.0), ConfigurationError);
  const double eps = JumpSampler::default_epsilon(pi);
  ASSERT_GT(eps, 0.0);
  const JumpSampler s(pi, eps);
  EXPECT_LT(s.neglected_variance(), 1e-8);
  // Jumps below eps are replaced by their mean: int_0^eps y e^{-y} / (1 - e^{-y}) dy ~ eps.
  EXPECT_NEAR(s.compensating_drift(), eps, eps * eps);
  Stream rng(105, 0);
  for (int k = 0; k < 1000; ++k) ASSERT_GE(s.sample(rng), eps);
}

}  // namespace
}  // namespace maplim
