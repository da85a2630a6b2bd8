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

#include "maplim/map.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "maplim/error.hpp"

namespace maplim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t locate_segment(const std::vector<MapSegment>& segs, double t) {
  const auto it = std::upper_bound(
      segs.begin(), segs.end(), t,
      [](double v, const MapSegment& s) { return v < s.time; });
  if (it == segs.begin()) throw ValidationError("MAP path evaluated before time 0");
  return static_cast<std::size_t>(it - segs.begin()) - 1;
}

}  // namespace

// ---------------------------------------------------------------------------
// SwitchLaw

SwitchLaw::SwitchLaw() : x_law_(FiniteMeasure::dirac(1.0)) {}

SwitchLaw::SwitchLaw(const FiniteMeasure& x_law) {
  if (!(x_law.total_mass() > 0.0)) {
    throw ValidationError("switch jump law needs positive mass");
  }
  if (x_law.atom_mass(0.0) > 0.0) {
    throw ValidationError("switch jump law has mass at x = 0 (infinite jump)");
  }
  x_law_ = x_law.scaled(1.0 / x_law.total_mass());
}

SwitchLaw SwitchLaw::dirac(double y) {
  if (!(y >= 0.0) || !std::isfinite(y)) {
    throw ValidationError("switch jump must be finite and >= 0");
  }
  return SwitchLaw(FiniteMeasure::dirac(std::exp(-y)));
}

bool SwitchLaw::is_zero() const noexcept {
  return x_law_.atom_mass(1.0) >= x_law_.total_mass() * (1.0 - 1e-15);
}

double SwitchLaw::laplace(double q) const {
  if (q == 0.0) return 1.0;
  return x_law_.integrate([q](double x, double w) { return 1.0 - one_minus_pow(x, w, q); });
}

double SwitchLaw::sample(Stream& rng) const {
  const auto [x, w] = x_law_.sample(rng);
  if (w <= 0.0) return 0.0;
  return x < 0.5 ? -std::log(x) : -std::log1p(-w);
}

// ---------------------------------------------------------------------------
// MapCharacteristics

MapCharacteristics MapCharacteristics::monotype(LaplaceExponent psi) {
  MapCharacteristics c;
  c.kappa = 1;
  c.psi = {std::move(psi)};
  c.lambda = {{0.0}};
  c.switch_jumps = {{SwitchLaw()}};
  return c;
}

void MapCharacteristics::validate() const {
  const auto k = static_cast<std::size_t>(kappa);
  if (kappa < 1) throw ValidationError("MAP needs at least one type");
  if (psi.size() != k || lambda.size() != k || switch_jumps.size() != k) {
    throw ValidationError("MAP characteristics sized inconsistently with kappa");
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (lambda[i].size() != k || switch_jumps[i].size() != k) {
      throw ValidationError("MAP switch tables must be kappa x kappa");
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (i != j && (!(lambda[i][j] >= 0.0) || !std::isfinite(lambda[i][j]))) {
        throw ValidationError("switch rates must be finite and >= 0");
      }
    }
  }
}

double MapCharacteristics::switch_rate(int i) const {
  double r = 0.0;
  for (int j = 0; j < kappa; ++j) {
    if (j != i - 1) r += lambda[i - 1][j];
  }
  return r;
}

NonConstancy check_not_constant(const MapCharacteristics& chars) {
  chars.validate();
  const int k = chars.kappa;
  std::vector<bool> induces(k, false);
  for (int i = 0; i < k; ++i) {
    bool a = !chars.psi[i].trivial();
    for (int j = 0; j < k && !a; ++j) {
      a = j != i && chars.lambda[i][j] > 0.0 && !chars.switch_jumps[i][j].is_zero();
    }
    induces[i] = a;
  }
  for (int i = 0; i < k; ++i) {
    std::vector<bool> seen(k, false);
    std::vector<int> stack{i};
    seen[i] = true;
    bool found = false;
    while (!stack.empty() && !found) {
      const int u = stack.back();
      stack.pop_back();
      if (induces[u]) {
        found = true;
        break;
      }
      for (int v = 0; v < k; ++v) {
        if (v != u && chars.lambda[u][v] > 0.0 && !seen[v]) {
          seen[v] = true;
          stack.push_back(v);
        }
      }
    }
    if (!found) return {false, i + 1};
  }
  return {true, 0};
}

// ---------------------------------------------------------------------------
// MapPath

double MapPath::xi_at(double t) const {
  if (t > end_time) throw ValidationError("MAP path evaluated beyond its range");
  const MapSegment& s = segments[locate_segment(segments, t)];
  if (std::isinf(s.xi)) return kInf;
  return s.xi + s.slope * (t - s.time);
}

int MapPath::type_at(double t) const {
  if (t > end_time) throw ValidationError("MAP path evaluated beyond its range");
  return segments[locate_segment(segments, t)].type;
}

double MapPath::xi_end() const {
  const MapSegment& s = segments.back();
  if (std::isinf(s.xi)) return kInf;
  return s.xi + s.slope * (end_time - s.time);
}

int MapPath::type_end() const { return segments.back().type; }

void MapPath::write_csv(std::ostream& out) const {
  const auto old = out.precision(17);
  out << "time,xi,type,killed\n";
  for (const MapSegment& s : segments) {
    const bool dead = std::isinf(s.xi);
    out << s.time << ',' << (dead ? std::string("inf") : std::to_string(s.xi)) << ','
        << s.type << ',' << (dead ? 1 : 0) << '\n';
  }
  if (!killed()) {
    out << end_time << ',' << xi_end() << ',' << type_end() << ",0\n";
  }
  out.precision(old);
}

// ---------------------------------------------------------------------------
// Simulation

MapSimulator::MapSimulator(MapCharacteristics chars, double epsilon,
                           std::int64_t max_events)
    : chars_(std::move(chars)), max_events_(max_events) {
  chars_.validate();
  const NonConstancy nc = check_not_constant(chars_);
  if (!nc.ok) {
    throw ValidationError("MAP characteristics may stay constant: type " +
                          std::to_string(nc.witness) + " never induces a jump");
  }
  for (const LaplaceExponent& psi : chars_.psi) {
    const double eps = epsilon < 0.0
                           ? JumpSampler::default_epsilon(psi.jumps(), 1e-8,
                                                          psi.options())
                           : epsilon;
    samplers_.emplace_back(psi.jumps(), eps, psi.options());
    drifts_.push_back(psi.drift() + samplers_.back().compensating_drift());
  }
}

std::vector<double> MapSimulator::moment_vector(double gamma) const {
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    const auto it = moment_cache_.find(gamma);
    if (it != moment_cache_.end()) return it->second;
  }
  std::vector<double> m = functional_moment_vector(chars_, gamma);
  std::lock_guard<std::mutex> lock(cache_mutex_);
  moment_cache_.emplace(gamma, m);
  return m;
}

MapPath MapSimulator::simulate(int start_type, const StopRule& stop,
                               Stream& rng) const {
  if (start_type < 1 || start_type > chars_.kappa) {
    throw ValidationError("invalid MAP start type " + std::to_string(start_type));
  }
  std::vector<double> levels(chars_.kappa, kInf);
  if (stop.kind == StopRule::Kind::kLevel) {
    std::fill(levels.begin(), levels.end(), stop.value);
  } else if (stop.kind == StopRule::Kind::kConverged) {
    if (!(stop.value > 0.0) || !(stop.gamma > 0.0)) {
      throw ConfigurationError("convergence rule needs tol > 0 and gamma > 0");
    }
    std::vector<double> m;
    try {
      m = moment_vector(stop.gamma);
    } catch (const DegenerateError& e) {
      throw RunawayError(std::string("exponential functional cannot converge: ") +
                             e.what(),
                         0, start_type);
    }
    for (int i = 0; i < chars_.kappa; ++i) {
      // Aim slightly below tol so that rounding cannot leave the residual above it.
      levels[i] = std::max(0.0, std::log(m[i] / (stop.value * (1.0 - 1e-9))) / stop.gamma);
    }
  }
  const PathStatus level_status = stop.kind == StopRule::Kind::kConverged
                                      ? PathStatus::kConverged
                                      : PathStatus::kLevel;
  const double horizon = stop.kind == StopRule::Kind::kHorizon ? stop.value : kInf;

  MapPath path;
  int type = start_type;
  double t = 0.0;
  double xi = 0.0;
  path.segments.push_back({0.0, 0.0, type, drifts_[type - 1]});
  std::vector<double> weights(chars_.kappa + 2);
  for (std::int64_t events = 0;; ++events) {
    const int i = type - 1;
    const double c = drifts_[i];
    const double level = levels[i];
    if (xi >= level) {
      path.end_time = t;
      path.status = level_status;
      return path;
    }
    const double kill = chars_.psi[i].killing();
    const double jump = samplers_[i].rate();
    const double total = kill + chars_.switch_rate(type) + jump;
    const double dt = total > 0.0 ? rng.exponential(total) : kInf;
    // Stop rules that trigger during the drift interval.
    double hit = kInf;
    if (c > 0.0 && std::isfinite(level)) hit = t + (level - xi) / c;
    if (horizon <= t + dt && horizon <= hit) {
      path.end_time = horizon;
      path.status = PathStatus::kHorizon;
      return path;
    }
    if (hit <= t + dt) {
      path.end_time = hit;
      path.status = level_status;
      return path;
    }
    if (std::isinf(dt) || events >= max_events_) {
      throw RunawayError("MAP stop rule not reached after " + std::to_string(events) +
                             " events",
                         0, type);
    }
    t += dt;
    xi += c * dt;
    weights[0] = kill;
    weights[1] = jump;
    for (int j = 0; j < chars_.kappa; ++j) {
      weights[j + 2] = j == i ? 0.0 : chars_.lambda[i][j];
    }
    const std::size_t ev = rng.categorical(weights);
    double y = 0.0;
    if (ev == 0) {
      y = kInf;
    } else if (ev == 1) {
      y = samplers_[i].sample(rng);
    } else {
      const int j = static_cast<int>(ev) - 2;
      y = chars_.switch_jumps[i][j].sample(rng);
      type = j + 1;
    }
    if (std::isinf(y)) {
      path.segments.push_back({t, kInf, 0, 0.0});
      path.end_time = t;
      path.status = PathStatus::kKilled;
      return path;
    }
    xi += y;
    path.segments.push_back({t, xi, type, drifts_[type - 1]});
  }
}

MapPath simulate_map(const MapCharacteristics& chars, int start_type,
                     const StopRule& stop, double epsilon, Stream& rng) {
  return MapSimulator(chars, epsilon).simulate(start_type, stop, rng);
}

std::vector<double> functional_moment_vector(const MapCharacteristics& chars,
                                             double gamma) {
  chars.validate();
  const int k = chars.kappa;
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    f(i, i) = chars.psi[i](gamma);
    for (int j = 0; j < k; ++j) {
      if (j == i || chars.lambda[i][j] == 0.0) continue;
      f(i, i) += chars.lambda[i][j];
      f(i, j) -= chars.lambda[i][j] * chars.switch_jumps[i][j].laplace(gamma);
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(f);
  if (!lu.isInvertible()) {
    throw DegenerateError("exponential functional has infinite mean (F(gamma) singular)");
  }
  const Eigen::VectorXd m = lu.solve(Eigen::VectorXd::Ones(k));
  std::vector<double> out(m.data(), m.data() + k);
  for (double v : out) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DegenerateError("exponential functional has infinite mean");
    }
  }
  return out;
}

FunctionalEstimate exponential_functional(const MapPath& path, double gamma,
                                          const std::vector<double>& moments) {
  if (!(gamma > 0.0)) throw ValidationError("exponential functional needs gamma > 0");
  FunctionalEstimate out;
  const auto& segs = path.segments;
  for (std::size_t k = 0; k < segs.size(); ++k) {
    const MapSegment& s = segs[k];
    if (std::isinf(s.xi)) break;
    const double end = k + 1 < segs.size() ? segs[k + 1].time : path.end_time;
    const double len = end - s.time;
    if (len <= 0.0) continue;
    const double base = std::exp(-gamma * s.xi);
    const double rate = gamma * s.slope;
    out.value += rate > 0.0 ? base * -std::expm1(-rate * len) / rate : base * len;
  }
  if (path.killed()) {
    out.residual = 0.0;
  } else if (!moments.empty()) {
    out.residual = std::exp(-gamma * path.xi_end()) * moments.at(path.type_end() - 1);
  } else {
    out.residual = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

FunctionalEstimate exponential_functional(const MapSimulator& sim, int start_type,
                                          double gamma, double tol, Stream& rng) {
  const MapPath path = sim.simulate(start_type, StopRule::converged(tol, gamma), rng);
  return exponential_functional(path, gamma, sim.moment_vector(gamma));
}

double moment_oracle(const LaplaceExponent& psi, double gamma, int k) {
  if (k < 1) throw ValidationError("moment order must be >= 1");
  if (!(gamma > 0.0)) throw ValidationError("moment oracle needs gamma > 0");
  double value = 1.0;
  for (int j = 1; j <= k; ++j) {
    const double p = psi(j * gamma);
    if (!(p > 0.0)) {
      throw DegenerateError("psi(" + std::to_string(j * gamma) + ") = 0");
    }
    value *= static_cast<double>(j) / p;
  }
  return value;
}

// ---------------------------------------------------------------------------
// Lamperti transform of a MAP path

LampertiPath::LampertiPath(std::vector<Segment> segments, double gamma,
                           double known_until, bool absorbed)
    : segments_(std::move(segments)),
      gamma_(gamma),
      known_until_(known_until),
      absorbed_(absorbed) {}

std::size_t LampertiPath::locate(double t) const {
  const auto it = std::upper_bound(
      segments_.begin(), segments_.end(), t,
      [](double v, const Segment& s) { return v < s.theta; });
  return static_cast<std::size_t>(it - segments_.begin()) - 1;
}

double LampertiPath::value_at(double t) const {
  if (!(t >= 0.0)) throw ValidationError("Lamperti path evaluated at negative time");
  if (t >= known_until_) {
    if (absorbed_) return 0.0;
    if (t > known_until_) {
      throw ValidationError("Lamperti path evaluated beyond its simulated range");
    }
  }
  const Segment& s = segments_[locate(t)];
  const double v = s.x_pow - s.decay * (t - s.theta);
  return v > 0.0 ? std::pow(v, 1.0 / gamma_) : 0.0;
}

int LampertiPath::type_at(double t) const {
  if (!(t >= 0.0)) throw ValidationError("Lamperti path evaluated at negative time");
  if (t >= known_until_) {
    if (absorbed_) return 0;
    if (t > known_until_) {
      throw ValidationError("Lamperti path evaluated beyond its simulated range");
    }
  }
  return segments_[locate(t)].type;
}

LampertiPath lamperti_transform_map(const MapPath& path, double gamma, double x0) {
  if (!(gamma > 0.0) || !(x0 > 0.0)) {
    throw ValidationError("Lamperti transform needs gamma > 0 and x0 > 0");
  }
  std::vector<LampertiPath::Segment> out;
  const double x0_pow = std::pow(x0, gamma);
  double theta = 0.0;
  const auto& segs = path.segments;
  for (std::size_t k = 0; k < segs.size(); ++k) {
    const MapSegment& s = segs[k];
    if (std::isinf(s.xi)) break;
    const double x_pow = x0_pow * std::exp(-gamma * s.xi);
    const double decay = gamma * s.slope;
    out.push_back({theta, x_pow, decay, s.type});
    const double end = k + 1 < segs.size() ? segs[k + 1].time : path.end_time;
    const double len = end - s.time;
    theta += decay > 0.0 ? x_pow * -std::expm1(-decay * len) / decay : x_pow * len;
  }
  const bool absorbed =
      path.status == PathStatus::kKilled || path.status == PathStatus::kConverged;
  return LampertiPath(std::move(out), gamma, theta, absorbed);
}

}  // namespace maplim
