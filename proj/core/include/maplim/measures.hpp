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

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "maplim/quadrature.hpp"
#include "maplim/rng.hpp"

namespace maplim {

/// Point mass `mass` at location `x`.
struct Atom {
  double x = 0.0;
  double mass = 0.0;
};

/// Nonnegative integrable density on (0, 1): either a scaled Beta density or
/// a piecewise-linear table (zero outside the tabulated range).
class Density {
 public:
  enum class Kind { kBeta, kTabulated };

  /// `scale` * Beta(a, b) density, so the total mass equals `scale`.
  static Density beta(double a, double b, double scale = 1.0);
  /// Constant density `value` on (0, 1).
  static Density constant(double value = 1.0);
  static Density tabulated(std::vector<double> xs, std::vector<double> ys);

  Kind kind() const noexcept { return kind_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double scale() const noexcept { return scale_; }
  const std::vector<double>& xs() const noexcept { return xs_; }
  const std::vector<double>& ys() const noexcept { return ys_; }

  /// Value at x, with w = 1 - x supplied for accuracy near 1.
  double operator()(double x, double w) const;
  double mass() const noexcept { return mass_; }

  /// Tabulated only: largest table value.
  double max_value() const noexcept;
  /// Tabulated only: limits at the ends of (0, 1).
  double value_near_zero() const noexcept;
  double value_near_one() const noexcept;

  Density reflected() const;
  Density scaled(double factor) const;

  /// Draw from the normalized density, returned as (x, 1 - x).
  std::pair<double, double> sample(Stream& rng) const;

 private:
  Density() = default;

  Kind kind_ = Kind::kBeta;
  double a_ = 1.0;
  double b_ = 1.0;
  double scale_ = 0.0;
  double log_norm_ = 0.0;
  std::vector<double> xs_;
  std::vector<double> ys_;
  std::vector<double> cum_;
  double mass_ = 0.0;
};

/// Finite nonnegative measure on [0, 1]: atoms plus an optional density.
class FiniteMeasure {
 public:
  FiniteMeasure() = default;
  explicit FiniteMeasure(std::vector<Atom> atoms,
                         std::optional<Density> density = std::nullopt);

  static FiniteMeasure dirac(double x, double mass = 1.0);
  static FiniteMeasure lebesgue(double scale = 1.0);
  static FiniteMeasure beta(double a, double b, double scale = 1.0);

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const std::optional<Density>& density() const noexcept { return density_; }

  double total_mass() const noexcept { return total_mass_; }
  /// Mass of the atom exactly at x (0 if none).
  double atom_mass(double x) const noexcept;
  /// Mass of the open interval (0, 1).
  double open_mass() const noexcept;
  bool empty() const noexcept { return total_mass_ == 0.0; }

  /// Integral of f(x, 1 - x) against the measure.
  double integrate(const UnitIntegrand& f,
                   const QuadratureOptions& opts = {}) const;

  /// Restriction to (0, 1) (drops atoms at 0 and 1).
  FiniteMeasure restricted_open() const;
  /// Image under x -> 1 - x.
  FiniteMeasure reflected() const;
  FiniteMeasure scaled(double factor) const;

  /// Draw from the normalized measure, returned as (x, 1 - x).
  std::pair<double, double> sample(Stream& rng) const;

 private:
  std::vector<Atom> atoms_;
  std::optional<Density> density_;
  double total_mass_ = 0.0;
};

/// Generator matrix of a finite continuous-time Markov chain.
class QMatrix {
 public:
  QMatrix() = default;
  /// Validates nonnegative off-diagonal entries and zero row sums (1e-12).
  explicit QMatrix(std::vector<std::vector<double>> rows);

  int kappa() const noexcept { return static_cast<int>(rows_.size()); }
  /// Entry q_{ij} for 1-based types.
  double rate(int i, int j) const { return rows_.at(i - 1).at(j - 1); }
  const std::vector<std::vector<double>>& rows() const noexcept { return rows_; }

  /// Strong connectivity of the positive-rate graph.
  bool irreducible() const;
  /// A 1-based pair (i, j) with j unreachable from i, if any.
  std::optional<std::pair<int, int>> unreachable_pair() const;

 private:
  std::vector<std::vector<double>> rows_;
};

/// Invariant probability vector of an irreducible Q-matrix.
/// Throws StructuralError naming an unreachable pair when Q is reducible.
std::vector<double> stationary_distribution(const QMatrix& q);

/// Invariant probability vector of an irreducible stochastic matrix.
std::vector<double> stationary_distribution_stochastic(
    const std::vector<std::vector<double>>& p);

/// One piece of a jump measure on (0, inf]: the image under y = -log x of
/// scale * x^pow_x * (1 - x)^pow_1mx * base(dx).
struct JumpComponent {
  FiniteMeasure base;
  double pow_x = 0.0;
  double pow_1mx = 0.0;
  double scale = 1.0;
};

/// Jump (Levy) measure of a subordinator, kept in x = e^{-y} coordinates.
/// Atoms at x = 0 are jumps to +inf and act as killing.
class JumpMeasure {
 public:
  JumpMeasure() = default;
  explicit JumpMeasure(std::vector<JumpComponent> components);

  /// Atoms (y, mass) with y in (0, inf].
  static JumpMeasure from_atoms(std::span<const Atom> y_atoms);

  const std::vector<JumpComponent>& components() const noexcept {
    return components_;
  }
  bool empty() const noexcept;
  bool infinite_activity() const noexcept { return infinite_; }

  /// Total mass; +inf for infinite activity.
  double total_mass(const QuadratureOptions& opts = {}) const;

  /// Weighted atoms in y coordinates (y may be +inf).
  std::vector<Atom> y_atoms() const;

  /// Integral of phi(y, x, w) against the measure, where x = e^{-y} and
  /// w = 1 - x.
  double integrate(const std::function<double(double, double, double)>& phi,
                   const QuadratureOptions& opts = {}) const;

  JumpMeasure scaled(double factor) const;
  /// Concatenates `other` scaled by `weight`.
  void append(const JumpMeasure& other, double weight = 1.0);

  /// Density weight h(x, w) of component k (without atoms).
  double density_weight(std::size_t k, double x, double w) const;

 private:
  std::vector<JumpComponent> components_;
  bool infinite_ = false;
};

/// Laplace exponent psi(q) = k + c q + int (1 - e^{-q y}) Pi(dy).
class LaplaceExponent {
 public:
  LaplaceExponent() = default;
  LaplaceExponent(double killing, double drift, JumpMeasure jumps = {},
                  QuadratureOptions opts = {});

  double operator()(double q) const;

  double killing() const noexcept { return killing_; }
  double drift() const noexcept { return drift_; }
  const JumpMeasure& jumps() const noexcept { return jumps_; }
  const QuadratureOptions& options() const noexcept { return opts_; }
  bool trivial() const noexcept;

  /// sum_i w_i psi_i, assembled from the triplets.
  static LaplaceExponent mixture(std::span<const double> weights,
                                 std::span<const LaplaceExponent> parts);

 private:
  double killing_ = 0.0;
  double drift_ = 0.0;
  JumpMeasure jumps_;
  QuadratureOptions opts_;
};

/// psi(q) = mu({0}) + mu({1}) q + int_{(0,1)} (1 - x^q) / (1 - x) mu(dx).
LaplaceExponent laplace_exponent_from_measure(const FiniteMeasure& mu,
                                              const QuadratureOptions& opts = {});

struct Pushforward {
  JumpMeasure measure;
  double total_mass = 0.0;  // +inf when infinite activity
  bool infinite = false;
};

/// Image of mu (supported in (0, 1)) under y = -log x, optionally reweighted
/// by 1 / (1 - x). Throws ValidationError for atoms at 0 or 1.
Pushforward pushforward_neglog(const FiniteMeasure& mu, bool reweight,
                               const QuadratureOptions& opts = {});

/// Exact sampler for the jumps of size >= epsilon of a jump measure.
/// Smaller jumps of densities with infinite activity near y = 0 are replaced
/// by a compensating drift.
class JumpSampler {
 public:
  JumpSampler() = default;
  JumpSampler(const JumpMeasure& pi, double epsilon,
              const QuadratureOptions& opts = {});

  /// Largest epsilon of the form 2^{-k} with int_0^eps y^2 Pi(dy) below
  /// `variance_target`; 0 when no truncation is needed.
  static double default_epsilon(const JumpMeasure& pi,
                                double variance_target = 1e-8,
                                const QuadratureOptions& opts = {});

  double rate() const noexcept { return rate_; }
  double epsilon() const noexcept { return epsilon_; }
  double compensating_drift() const noexcept { return drift_; }
  double neglected_variance() const noexcept { return variance_; }

  /// Jump size in (0, inf]; +inf encodes a jump to the cemetery.
  double sample(Stream& rng) const;

 private:
  enum class PieceKind { kAtom, kBeta, kThinned, kLeft, kRight };
  struct Piece {
    PieceKind kind;
    double mass;
    double y = 0.0;  // atoms
    std::size_t component = 0;
    double p = 0.0;
    double q = 0.0;
    double lo = 0.0;  // range for kLeft (x) and kRight (w)
    double hi = 0.0;
    double bound = 1.0;  // rejection envelope constant
  };

  double thinning(const Piece& piece, double x, double w) const;

  JumpMeasure pi_;
  std::vector<Piece> pieces_;
  std::vector<double> weights_;
  double rate_ = 0.0;
  double epsilon_ = 0.0;
  double drift_ = 0.0;
  double variance_ = 0.0;
};

}  // namespace maplim
