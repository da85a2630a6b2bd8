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
#include <iosfwd>
#include <limits>
#include <map>
#include <mutex>
#include <vector>

#include "maplim/measures.hpp"
#include "maplim/rng.hpp"

namespace maplim {

/// Law of the additional jump B_{ij} at a type switch, stored as the law of
/// x = e^{-B} on (0, 1]; an atom at 1 is a switch without a jump.
class SwitchLaw {
 public:
  /// delta_0: switch without a jump.
  SwitchLaw();
  /// Normalizes `x_law`, which must have no mass at 0.
  explicit SwitchLaw(const FiniteMeasure& x_law);

  static SwitchLaw dirac(double y);

  const FiniteMeasure& x_law() const noexcept { return x_law_; }
  bool is_zero() const noexcept;
  /// E[e^{-q B}].
  double laplace(double q) const;
  double sample(Stream& rng) const;

 private:
  FiniteMeasure x_law_;
};

/// Characteristics of a monotone Markov additive process with kappa types.
struct MapCharacteristics {
  int kappa = 1;
  std::vector<LaplaceExponent> psi;
  /// lambda[i][j] for 0-based types; the diagonal is ignored.
  std::vector<std::vector<double>> lambda;
  std::vector<std::vector<SwitchLaw>> switch_jumps;

  static MapCharacteristics monotype(LaplaceExponent psi);

  void validate() const;
  /// Total switching rate out of 1-based type i.
  double switch_rate(int i) const;
};

struct NonConstancy {
  bool ok = true;
  /// First 1-based type failing both clauses, 0 when ok.
  int witness = 0;
};

NonConstancy check_not_constant(const MapCharacteristics& chars);

struct StopRule {
  enum class Kind { kHorizon, kLevel, kConverged };
  Kind kind = Kind::kHorizon;
  double value = 1.0;
  double gamma = 1.0;

  static StopRule horizon(double t) { return {Kind::kHorizon, t, 1.0}; }
  static StopRule level(double xi) { return {Kind::kLevel, xi, 1.0}; }
  /// Stop once the expected remaining exponential functional
  /// e^{-gamma xi_t} E_{K_t}[I] drops below `tol`.
  static StopRule converged(double tol, double gamma) {
    return {Kind::kConverged, tol, gamma};
  }
};

enum class PathStatus { kHorizon, kLevel, kConverged, kKilled };

/// Segment starting at `time` with value `xi` growing at rate `slope`.
struct MapSegment {
  double time;
  double xi;
  int type;
  double slope;
};

struct MapPath {
  std::vector<MapSegment> segments;
  double end_time = 0.0;
  PathStatus status = PathStatus::kHorizon;

  bool killed() const noexcept { return status == PathStatus::kKilled; }
  double xi_at(double t) const;
  int type_at(double t) const;
  /// Value and type at `end_time`.
  double xi_end() const;
  int type_end() const;

  /// CSV with header `time,xi,type,killed`.
  void write_csv(std::ostream& out) const;
};

/// Simulator for a fixed set of characteristics, with per-type jump samplers
/// prepared once.
class MapSimulator {
 public:
  /// `epsilon` < 0 selects the default cutoff per type.
  explicit MapSimulator(MapCharacteristics chars, double epsilon = -1.0,
                        std::int64_t max_events = 1'000'000'000);

  MapPath simulate(int start_type, const StopRule& stop, Stream& rng) const;

  const MapCharacteristics& characteristics() const noexcept { return chars_; }
  const JumpSampler& sampler(int type) const { return samplers_.at(type - 1); }

  /// Vector of E_i[int_0^inf e^{-gamma xi_r} dr], i = 1..kappa.
  std::vector<double> moment_vector(double gamma) const;

 private:
  MapCharacteristics chars_;
  std::vector<JumpSampler> samplers_;
  std::vector<double> drifts_;
  std::int64_t max_events_;
  mutable std::mutex cache_mutex_;
  mutable std::map<double, std::vector<double>> moment_cache_;
};

MapPath simulate_map(const MapCharacteristics& chars, int start_type,
                     const StopRule& stop, double epsilon, Stream& rng);

/// Solves F(gamma) m = 1 with F_ii = psi_i(gamma) + sum_j lambda_ij and
/// F_ij = -lambda_ij E[e^{-gamma B_ij}]. Throws DegenerateError if singular.
std::vector<double> functional_moment_vector(const MapCharacteristics& chars,
                                             double gamma);

struct FunctionalEstimate {
  double value = 0.0;
  /// Expected remainder beyond the simulated range (0 when killed).
  double residual = 0.0;
};

/// int e^{-gamma xi_r} dr over the simulated range, segment by segment.
/// `moments` (from moment_vector) enables the residual estimate.
FunctionalEstimate exponential_functional(const MapPath& path, double gamma,
                                          const std::vector<double>& moments = {});

/// Simulates until the residual is below `tol` and integrates.
FunctionalEstimate exponential_functional(const MapSimulator& sim, int start_type,
                                          double gamma, double tol, Stream& rng);

/// k! / prod_{j=1..k} psi(j gamma).
double moment_oracle(const LaplaceExponent& psi, double gamma, int k);

/// Lamperti transform X_t = x0 exp(-xi_{rho(t x0^{-gamma})}) of a MAP path.
class LampertiPath {
 public:
  struct Segment {
    double theta;  // start time
    double x_pow;  // X(theta)^gamma
    double decay;  // gamma * drift: X^gamma decreases linearly at this rate
    int type;
  };

  LampertiPath(std::vector<Segment> segments, double gamma, double known_until,
               bool absorbed);

  double value_at(double t) const;
  int type_at(double t) const;
  /// Time at which X reaches 0; +inf when not yet known.
  double absorption_time() const noexcept {
    return absorbed_ ? known_until_ : std::numeric_limits<double>::infinity();
  }
  double known_until() const noexcept { return known_until_; }
  const std::vector<Segment>& segments() const noexcept { return segments_; }

 private:
  std::size_t locate(double t) const;

  std::vector<Segment> segments_;
  double gamma_;
  double known_until_;
  bool absorbed_;
};

/// Converged and killed paths are treated as absorbed at the end of the
/// simulated range; other paths throw beyond it.
LampertiPath lamperti_transform_map(const MapPath& path, double gamma,
                                    double x0 = 1.0);

}  // namespace maplim
