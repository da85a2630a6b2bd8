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

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "maplim/chain.hpp"
#include "maplim/map.hpp"
#include "maplim/measures.hpp"
#include "maplim/rng.hpp"

namespace maplim {

/// Single-type position law n -> m <= n.
class PositionLaw {
 public:
  virtual ~PositionLaw() = default;

  /// Entries (m, p) summing to 1.
  virtual std::vector<std::pair<std::int64_t, double>> row(std::int64_t n) const = 0;
  virtual std::int64_t support_size(std::int64_t n) const {
    return static_cast<std::int64_t>(row(n).size());
  }
  /// P(m != n).
  virtual double move_probability(std::int64_t n) const = 0;
  virtual std::int64_t sample(std::int64_t n, Stream& rng) const;
  /// Draw conditioned on m != n.
  virtual std::int64_t sample_move(std::int64_t n, Stream& rng) const = 0;
  virtual bool is_absorbing(std::int64_t n) const = 0;
};

/// Jump from n to floor(n r) with probability min(1, c n^{-gamma}), else stay.
class ScaledJumpLaw final : public PositionLaw {
 public:
  ScaledJumpLaw(double ratio, double rate, double exponent);

  std::vector<std::pair<std::int64_t, double>> row(std::int64_t n) const override;
  double move_probability(std::int64_t n) const override;
  std::int64_t sample_move(std::int64_t n, Stream& rng) const override;
  bool is_absorbing(std::int64_t n) const override { return n == 0; }

  double ratio() const noexcept { return ratio_; }
  double rate() const noexcept { return rate_; }
  double exponent() const noexcept { return exponent_; }
  std::int64_t target(std::int64_t n) const;

 private:
  double ratio_;
  double rate_;
  double exponent_;
};

/// Type transition matrices P_n: either constant, or I + h(n) Q with
/// h(n) = min(n^{-beta}, 1 / max_i |q_ii|) so that P_n stays stochastic.
class TypeMatrixFamily {
 public:
  static TypeMatrixFamily constant(std::vector<std::vector<double>> p);
  static TypeMatrixFamily perturbed(QMatrix q, double beta);

  int kappa() const noexcept { return kappa_; }
  bool is_constant() const noexcept { return constant_; }
  double beta() const noexcept { return beta_; }
  /// Q = P - I for constant families, the generator otherwise.
  const QMatrix& generator() const noexcept { return q_; }

  /// P_n(i, j) for 1-based types.
  double entry(std::int64_t n, int i, int j) const;
  /// 1 - P_n(i, i), without cancellation.
  double leave(std::int64_t n, int i) const;
  std::vector<std::vector<double>> at(std::int64_t n) const;

 private:
  int kappa_ = 1;
  bool constant_ = true;
  double beta_ = 0.0;
  std::vector<std::vector<double>> p_;
  QMatrix q_;
  double h_cap_ = 1.0;

  double h(std::int64_t n) const;
};

/// p_{(n,i)}(m, j) = P_n(i, j) p^{(i)}_n(m).
class ProductKernel final : public TransitionKernel {
 public:
  ProductKernel(std::vector<std::shared_ptr<const PositionLaw>> laws,
                TypeMatrixFamily types);

  int kappa() const override { return types_.kappa(); }
  std::vector<RowEntry> row(State s) const override;
  bool is_absorbing(std::int64_t position) const override;
  std::int64_t support_size(State s) const override;
  double leave_probability(State s) const override;
  State sample(State s, Stream& rng) const override;
  State sample_departure(State s, Stream& rng) const override;

  const PositionLaw& law(int type) const { return *laws_.at(type - 1); }
  const TypeMatrixFamily& types() const noexcept { return types_; }

 private:
  std::vector<std::shared_ptr<const PositionLaw>> laws_;
  TypeMatrixFamily types_;
};

// ---------------------------------------------------------------------------
// Coalescents in varying environment

struct CoalescentEnvSpec {
  /// One coalescence measure per environment, with no mass at 0.
  std::vector<FiniteMeasure> lambda;
  double gamma = 0.5;
  TypeMatrixFamily types = TypeMatrixFamily::constant({{1.0}});

  void validate() const;
};

/// Block-count law of a Lambda-coalescent: n blocks become k = n - b + 1
/// with probability proportional to C(n, b) int x^{b-2} (1-x)^{n-b} Lambda(dx).
class CoalescentPositionLaw final : public PositionLaw {
 public:
  explicit CoalescentPositionLaw(FiniteMeasure lambda,
                                 QuadratureOptions opts = {});

  std::vector<std::pair<std::int64_t, double>> row(std::int64_t n) const override;
  std::int64_t support_size(std::int64_t n) const override {
    return n <= 1 ? 1 : n - 1;
  }
  double move_probability(std::int64_t n) const override { return n <= 1 ? 0.0 : 1.0; }
  std::int64_t sample_move(std::int64_t n, Stream& rng) const override;
  bool is_absorbing(std::int64_t n) const override { return n <= 1; }

  /// Total merger rate g_n = sum_{b=2}^{n} C(n, b) lambda_{n,b}.
  double total_rate(std::int64_t n) const;

 private:
  struct Piece {
    enum class Kind { kBeta, kAtom, kTabulated };
    Kind kind = Kind::kAtom;
    double a = 1.0;
    double b = 1.0;
    double scale = 0.0;
    double x = 0.0;
    std::optional<Density> density;
  };

  double piece_rate(std::size_t k, std::int64_t n) const;
  /// Rates C(n, b) lambda_{n,b} for b = 2..n (index b - 2).
  std::vector<double> piece_terms(std::size_t k, std::int64_t n) const;
  std::int64_t sample_piece(std::size_t k, std::int64_t n, Stream& rng) const;
  /// int (1 - x)^power over piece k.
  double tail_moment(std::size_t k, std::int64_t power) const;

  FiniteMeasure lambda_;
  QuadratureOptions opts_;
  std::vector<Piece> pieces_;
  mutable std::mutex mutex_;
  mutable std::vector<std::vector<double>> rate_cache_;
  mutable std::map<std::pair<std::size_t, std::int64_t>, std::vector<double>>
      table_cache_;
};

std::shared_ptr<ProductKernel> coalescent_kernel(const CoalescentEnvSpec& spec);

struct TailEstimate {
  double c = 0.0;
  /// Largest relative deviation from `c` over the last decade of the grid.
  double oscillation = 0.0;
  bool regular = false;
  std::vector<std::pair<double, double>> grid;
};

/// u^gamma int_{[u,1]} x^{-2} Lambda(dx) on a geometric grid down to 1e-6.
TailEstimate tail_constant(const FiniteMeasure& lambda, double gamma,
                           const QuadratureOptions& opts = {});

/// (Gamma(2 - gamma) c)^{-1} int (1 - (1-x)^q) x^{-2} Lambda(dx).
LaplaceExponent coalescent_limit_psi(const FiniteMeasure& lambda, double gamma,
                                     double c, const QuadratureOptions& opts = {});

/// Limit characteristics of the block-counting chain started from
/// `start_type`: a MAP with switch rates Q when beta = gamma, the
/// pi-average of the exponents when beta < gamma, and the exponent of
/// `start_type` alone when beta > gamma. Tail constants are estimated with
/// tail_constant when `c` is empty.
MapCharacteristics coalescent_limit(const CoalescentEnvSpec& spec, int start_type = 1,
                                    std::vector<double> c = {});

struct CollisionCount {
  std::int64_t collisions = 0;
  SteppedPath blocks;
};

CollisionCount count_collisions(const CoalescentEnvSpec& spec, std::int64_t n,
                                int type, Stream& rng);
CollisionCount count_collisions(const ProductKernel& kernel, std::int64_t n,
                                int type, Stream& rng);

// ---------------------------------------------------------------------------
// Markov random walks with a barrier

/// Increment law on Z+ with an exactly known tail.
class IncrementLaw {
 public:
  /// q_k = (1 - p)^{k-1} p on {1, 2, ...}; mean 1/p.
  static IncrementLaw geometric(double p);
  /// P(inc > k) = (k + 1)^{-alpha} on {1, 2, ...}.
  static IncrementLaw polynomial_tail(double alpha);
  /// q_k = probs[k] on {0, ..., K}.
  static IncrementLaw table(std::vector<double> probs);

  double pmf(std::int64_t k) const;
  /// P(inc > k).
  double tail(std::int64_t k) const;
  /// P(lo <= inc <= hi) without cancellation, lo in {0, 1}.
  double prob_between(std::int64_t lo, std::int64_t hi) const;
  double mean() const;
  /// lim n^gamma P(inc > n).
  double tail_limit(double gamma) const;
  /// Draw conditioned on lo <= inc <= hi.
  std::int64_t sample_between(std::int64_t lo, std::int64_t hi, Stream& rng) const;

  enum class Kind { kGeometric, kPolynomial, kTable };
  Kind kind() const noexcept { return kind_; }
  double parameter() const noexcept { return param_; }
  const std::vector<double>& probs() const noexcept { return probs_; }

 private:
  Kind kind_ = Kind::kGeometric;
  double param_ = 0.5;
  std::vector<double> probs_;
  std::vector<double> tails_;
};

struct BarrierWalkSpec {
  /// Driving chain transition matrix.
  std::vector<std::vector<double>> p;
  /// increments[i][j]: law of the jump when the type moves from i to j.
  std::vector<std::vector<IncrementLaw>> increments;

  int kappa() const noexcept { return static_cast<int>(p.size()); }
  void validate() const;
};

/// Kernel in X = n - S coordinates: the walk may not jump past the barrier.
/// Positions from which no positive move is possible are absorbing.
class BarrierWalkKernel final : public TransitionKernel {
 public:
  explicit BarrierWalkKernel(BarrierWalkSpec spec);

  int kappa() const override { return spec_.kappa(); }
  std::vector<RowEntry> row(State s) const override;
  bool is_absorbing(std::int64_t position) const override;
  std::int64_t support_size(State s) const override;
  double leave_probability(State s) const override;
  State sample_departure(State s, Stream& rng) const override;

  const BarrierWalkSpec& spec() const noexcept { return spec_; }

 private:
  /// 1 - qbar_s^{(i)} = sum_j P(i, j) P(inc_ij <= s).
  double admissible(std::int64_t s, int i) const;

  BarrierWalkSpec spec_;
};

struct HeavyTailMode {
  std::vector<double> a;
  double gamma = 0.5;
};

struct FiniteMeanLimit {
  std::vector<double> m;
  std::vector<double> pi;
  /// sum_i m_i and 1 / sum_i m_i.
  double m_sum = 0.0;
  double absorption_sum = 0.0;
  /// sum_i pi_i m_i and its reciprocal.
  double m_weighted = 0.0;
  double absorption_weighted = 0.0;
};

/// psi(lambda) = sum_i pi_i a_i int (1 - e^{-lambda x}) gamma e^{-x}
/// (1 - e^{-x})^{-gamma-1} dx.
LaplaceExponent barrier_limit(const BarrierWalkSpec& spec, const HeavyTailMode& mode);

/// Both candidate slopes and absorption constants in the finite-mean case.
FiniteMeanLimit barrier_limit(const BarrierWalkSpec& spec);

/// a_i = lim n^gamma qbar_n^{(i)} computed from the increment laws.
std::vector<double> barrier_tail_constants(const BarrierWalkSpec& spec, double gamma);

}  // namespace maplim
