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

#include "maplim/measures.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "maplim/error.hpp"

namespace maplim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_log_x(double x, double w) {
  return x < 0.5 ? std::log(x) : std::log1p(-w);
}

double neglog(double x, double w) {
  if (x <= 0.0) return kInf;
  return x < 0.5 ? -std::log(x) : -std::log1p(-w);
}

// x^p (1 - x)^q, returning 0 where a zero factor has a positive power.
double power_weight(double x, double w, double p, double q) {
  double lx = 0.0;
  double lw = 0.0;
  if (p != 0.0) {
    if (x <= 0.0) return p > 0.0 ? 0.0 : kInf;
    lx = p * safe_log_x(x, w);
  }
  if (q != 0.0) {
    if (w <= 0.0) return q > 0.0 ? 0.0 : kInf;
    lw = q * safe_log_x(w, x);
  }
  return std::exp(lx + lw);
}

// Exponents and constant of the density part of a jump component, written as
// K * x^p * (1 - x)^q * g(x) with g in [0, 1].
struct DensityForm {
  double p;
  double q;
  double k;
  bool tabulated;
};

DensityForm density_form(const JumpComponent& c) {
  const Density& d = *c.base.density();
  if (d.kind() == Density::Kind::kBeta) {
    const double log_norm = -std::log(boost::math::beta(d.a(), d.b()));
    return {c.pow_x + d.a() - 1.0, c.pow_1mx + d.b() - 1.0,
            c.scale * d.scale() * std::exp(log_norm), false};
  }
  return {c.pow_x, c.pow_1mx, c.scale * d.max_value(), true};
}

bool has_density(const JumpComponent& c) {
  return c.base.density().has_value() && c.base.density()->mass() > 0.0 &&
         c.scale > 0.0;
}

bool needs_truncation(const JumpComponent& c) {
  return has_density(c) && density_form(c).q <= -1.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Density

Density Density::beta(double a, double b, double scale) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw ValidationError("beta density needs positive finite parameters");
  }
  if (!(scale >= 0.0) || !std::isfinite(scale)) {
    throw ValidationError("density scale must be finite and nonnegative");
  }
  Density d;
  d.kind_ = Kind::kBeta;
  d.a_ = a;
  d.b_ = b;
  d.scale_ = scale;
  d.log_norm_ = -std::log(boost::math::beta(a, b));
  d.mass_ = scale;
  return d;
}

Density Density::constant(double value) { return beta(1.0, 1.0, value); }

Density Density::tabulated(std::vector<double> xs, std::vector<double> ys) {
  if (xs.size() < 2 || xs.size() != ys.size()) {
    throw ValidationError("tabulated density needs matching grids of size >= 2");
  }
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (!(xs[k] >= 0.0 && xs[k] <= 1.0)) {
      throw ValidationError("tabulated density grid must lie in [0, 1]");
    }
    if (k > 0 && !(xs[k] > xs[k - 1])) {
      throw ValidationError("tabulated density grid must be strictly increasing");
    }
    if (!(ys[k] >= 0.0) || !std::isfinite(ys[k])) {
      throw ValidationError("tabulated density values must be finite and >= 0");
    }
  }
  Density d;
  d.kind_ = Kind::kTabulated;
  d.xs_ = std::move(xs);
  d.ys_ = std::move(ys);
  d.cum_.assign(d.xs_.size() - 1, 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < d.xs_.size(); ++k) {
    d.cum_[k] = 0.5 * (d.ys_[k] + d.ys_[k + 1]) * (d.xs_[k + 1] - d.xs_[k]);
    total += d.cum_[k];
  }
  d.mass_ = total;
  d.scale_ = total;
  return d;
}

double Density::operator()(double x, double w) const {
  if (kind_ == Kind::kBeta) {
    if (scale_ == 0.0) return 0.0;
    return scale_ * std::exp(log_norm_) * power_weight(x, w, a_ - 1.0, b_ - 1.0);
  }
  if (x < xs_.front() || x > xs_.back()) return 0.0;
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  if (it == xs_.end()) return ys_.back();
  const std::size_t k = static_cast<std::size_t>(it - xs_.begin()) - 1;
  const double t = (x - xs_[k]) / (xs_[k + 1] - xs_[k]);
  return ys_[k] + t * (ys_[k + 1] - ys_[k]);
}

double Density::max_value() const noexcept {
  if (kind_ != Kind::kTabulated) return kInf;
  return *std::max_element(ys_.begin(), ys_.end());
}

double Density::value_near_zero() const noexcept {
  if (kind_ != Kind::kTabulated) return kInf;
  return xs_.front() > 0.0 ? 0.0 : ys_.front();
}

double Density::value_near_one() const noexcept {
  if (kind_ != Kind::kTabulated) return kInf;
  return xs_.back() < 1.0 ? 0.0 : ys_.back();
}

Density Density::reflected() const {
  if (kind_ == Kind::kBeta) return beta(b_, a_, scale_);
  std::vector<double> xs(xs_.rbegin(), xs_.rend());
  std::vector<double> ys(ys_.rbegin(), ys_.rend());
  for (double& x : xs) x = 1.0 - x;
  return tabulated(std::move(xs), std::move(ys));
}

Density Density::scaled(double factor) const {
  if (kind_ == Kind::kBeta) return beta(a_, b_, scale_ * factor);
  std::vector<double> ys = ys_;
  for (double& y : ys) y *= factor;
  return tabulated(xs_, std::move(ys));
}

std::pair<double, double> Density::sample(Stream& rng) const {
  if (kind_ == Kind::kBeta) return rng.beta(a_, b_);
  const std::size_t k = rng.categorical(cum_);
  const double y0 = ys_[k];
  const double y1 = ys_[k + 1];
  const double m = 0.5 * (y0 + y1);
  const double u = rng.uniform();
  // Invert y0 t + (y1 - y0) t^2 / 2 = u m on [0, 1].
  const double t =
      2.0 * u * m / (y0 + std::sqrt(y0 * y0 + 2.0 * (y1 - y0) * u * m));
  const double x = xs_[k] + t * (xs_[k + 1] - xs_[k]);
  return {x, 1.0 - x};
}

// ---------------------------------------------------------------------------
// FiniteMeasure

FiniteMeasure::FiniteMeasure(std::vector<Atom> atoms,
                             std::optional<Density> density)
    : atoms_(std::move(atoms)), density_(std::move(density)) {
  std::sort(atoms_.begin(), atoms_.end(),
            [](const Atom& l, const Atom& r) { return l.x < r.x; });
  double total = 0.0;
  for (std::size_t k = 0; k < atoms_.size(); ++k) {
    const Atom& a = atoms_[k];
    if (!(a.x >= 0.0 && a.x <= 1.0)) {
      throw ValidationError("atom location " + std::to_string(a.x) +
                            " outside [0, 1]");
    }
    if (!(a.mass > 0.0) || !std::isfinite(a.mass)) {
      throw ValidationError("atom masses must be finite and positive");
    }
    if (k > 0 && atoms_[k - 1].x == a.x) {
      throw ValidationError("duplicate atom location " + std::to_string(a.x));
    }
    total += a.mass;
  }
  if (density_) total += density_->mass();
  total_mass_ = total;
}

FiniteMeasure FiniteMeasure::dirac(double x, double mass) {
  return FiniteMeasure({{x, mass}});
}

FiniteMeasure FiniteMeasure::lebesgue(double scale) {
  return FiniteMeasure({}, Density::constant(scale));
}

FiniteMeasure FiniteMeasure::beta(double a, double b, double scale) {
  return FiniteMeasure({}, Density::beta(a, b, scale));
}

double FiniteMeasure::atom_mass(double x) const noexcept {
  for (const Atom& a : atoms_) {
    if (a.x == x) return a.mass;
  }
  return 0.0;
}

double FiniteMeasure::open_mass() const noexcept {
  return total_mass_ - atom_mass(0.0) - atom_mass(1.0);
}

double FiniteMeasure::integrate(const UnitIntegrand& f,
                                const QuadratureOptions& opts) const {
  double sum = 0.0;
  for (const Atom& a : atoms_) sum += a.mass * f(a.x, 1.0 - a.x);
  if (density_ && density_->mass() > 0.0) {
    const Density& d = *density_;
    const bool beta = d.kind() == Density::Kind::kBeta;
    sum += integrate_unit_singular(
        [&](double x, double w) {
          const double v = d(x, w);
          return v == 0.0 ? 0.0 : v * f(x, w);
        },
        beta ? d.a() - 1.0 : 0.0, beta ? d.b() - 1.0 : 0.0, opts);
  }
  return sum;
}

FiniteMeasure FiniteMeasure::restricted_open() const {
  std::vector<Atom> inner;
  for (const Atom& a : atoms_) {
    if (a.x > 0.0 && a.x < 1.0) inner.push_back(a);
  }
  return FiniteMeasure(std::move(inner), density_);
}

FiniteMeasure FiniteMeasure::reflected() const {
  std::vector<Atom> atoms;
  for (const Atom& a : atoms_) atoms.push_back({1.0 - a.x, a.mass});
  std::optional<Density> d;
  if (density_) d = density_->reflected();
  return FiniteMeasure(std::move(atoms), std::move(d));
}

FiniteMeasure FiniteMeasure::scaled(double factor) const {
  if (factor == 0.0) return FiniteMeasure();
  std::vector<Atom> atoms;
  for (const Atom& a : atoms_) atoms.push_back({a.x, a.mass * factor});
  std::optional<Density> d;
  if (density_) d = density_->scaled(factor);
  return FiniteMeasure(std::move(atoms), std::move(d));
}

std::pair<double, double> FiniteMeasure::sample(Stream& rng) const {
  if (total_mass_ <= 0.0) {
    throw ValidationError("cannot sample from an empty measure");
  }
  const double dm = density_ ? density_->mass() : 0.0;
  double u = rng.uniform() * total_mass_;
  for (const Atom& a : atoms_) {
    if (u < a.mass) return {a.x, 1.0 - a.x};
    u -= a.mass;
  }
  if (dm > 0.0) return density_->sample(rng);
  const Atom& last = atoms_.back();
  return {last.x, 1.0 - last.x};
}

// ---------------------------------------------------------------------------
// QMatrix

QMatrix::QMatrix(std::vector<std::vector<double>> rows) : rows_(std::move(rows)) {
  const std::size_t k = rows_.size();
  if (k == 0) throw ValidationError("Q-matrix must have at least one type");
  for (std::size_t i = 0; i < k; ++i) {
    if (rows_[i].size() != k) throw ValidationError("Q-matrix must be square");
    double sum = 0.0;
    double scale = 1.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double v = rows_[i][j];
      if (!std::isfinite(v)) throw ValidationError("Q-matrix entries must be finite");
      if (i != j && v < 0.0) {
        throw ValidationError("Q-matrix off-diagonal entries must be >= 0");
      }
      sum += v;
      scale = std::max(scale, std::abs(v));
    }
    if (std::abs(sum) > 1e-12 * scale) {
      throw ValidationError("Q-matrix row " + std::to_string(i + 1) +
                            " does not sum to 0");
    }
  }
}

std::optional<std::pair<int, int>> QMatrix::unreachable_pair() const {
  const int k = kappa();
  for (int s = 0; s < k; ++s) {
    std::vector<bool> seen(k, false);
    std::vector<int> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < k; ++v) {
        if (v != u && rows_[u][v] > 0.0 && !seen[v]) {
          seen[v] = true;
          stack.push_back(v);
        }
      }
    }
    for (int t = 0; t < k; ++t) {
      if (!seen[t]) return std::make_pair(s + 1, t + 1);
    }
  }
  return std::nullopt;
}

bool QMatrix::irreducible() const { return !unreachable_pair().has_value(); }

std::vector<double> stationary_distribution(const QMatrix& q) {
  if (const auto pair = q.unreachable_pair()) {
    throw StructuralError("Q-matrix is reducible: type " +
                              std::to_string(pair->second) +
                              " is unreachable from type " +
                              std::to_string(pair->first),
                          pair->first, pair->second);
  }
  const int k = q.kappa();
  Eigen::MatrixXd a(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) a(j, i) = q.rows()[i][j];
  }
  a.row(k - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
  rhs(k - 1) = 1.0;
  const Eigen::VectorXd pi = a.fullPivLu().solve(rhs);
  std::vector<double> out(pi.data(), pi.data() + k);
  double sum = 0.0;
  for (double& v : out) {
    v = std::max(v, 0.0);
    sum += v;
  }
  for (double& v : out) v /= sum;
  return out;
}

std::vector<double> stationary_distribution_stochastic(
    const std::vector<std::vector<double>>& p) {
  std::vector<std::vector<double>> rows = p;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      if (!(p[i][j] >= 0.0)) {
        throw ValidationError("stochastic matrix entries must be >= 0");
      }
      sum += p[i][j];
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw ValidationError("stochastic matrix row " + std::to_string(i + 1) +
                            " does not sum to 1");
    }
    rows[i][i] = 0.0;
    double off = 0.0;
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      if (j != i) off += rows[i][j];
    }
    rows[i][i] = -off;
  }
  return stationary_distribution(QMatrix(std::move(rows)));
}

// ---------------------------------------------------------------------------
// JumpMeasure

JumpMeasure::JumpMeasure(std::vector<JumpComponent> components)
    : components_(std::move(components)) {
  for (const JumpComponent& c : components_) {
    if (!(c.scale >= 0.0) || !std::isfinite(c.scale)) {
      throw ValidationError("jump component scale must be finite and >= 0");
    }
    if (c.scale == 0.0) continue;
    for (const Atom& a : c.base.atoms()) {
      if (a.x == 1.0) {
        throw ValidationError("jump measure atom at y = 0 (x = 1)");
      }
      if (a.x == 0.0 && c.pow_x < 0.0) {
        throw ValidationError("jump measure atom at x = 0 with negative weight power");
      }
    }
    if (!has_density(c)) continue;
    const Density& d = *c.base.density();
    double p_eff;
    double q_eff;
    bool reaches_one = true;
    bool reaches_zero = true;
    if (d.kind() == Density::Kind::kBeta) {
      const DensityForm f = density_form(c);
      p_eff = f.p;
      q_eff = f.q;
    } else {
      reaches_zero = d.xs().front() == 0.0;
      reaches_one = d.xs().back() == 1.0;
      p_eff = c.pow_x + (d.value_near_zero() > 0.0 ? 0.0 : 1.0);
      q_eff = c.pow_1mx + (d.value_near_one() > 0.0 ? 0.0 : 1.0);
    }
    if (reaches_zero && !(p_eff > -1.0)) {
      throw ValidationError("jump measure has non-integrable mass of large jumps");
    }
    if (reaches_one && !(q_eff > -2.0)) {
      throw ValidationError("jump measure violates int (1 ^ y) Pi(dy) < inf");
    }
    if (reaches_one && q_eff <= -1.0) infinite_ = true;
  }
}

JumpMeasure JumpMeasure::from_atoms(std::span<const Atom> y_atoms) {
  std::vector<Atom> atoms;
  for (const Atom& a : y_atoms) {
    if (!(a.x > 0.0)) throw ValidationError("jump sizes must be positive");
    atoms.push_back({std::isinf(a.x) ? 0.0 : std::exp(-a.x), a.mass});
  }
  return JumpMeasure({JumpComponent{FiniteMeasure(std::move(atoms)), 0.0, 0.0, 1.0}});
}

bool JumpMeasure::empty() const noexcept {
  for (const JumpComponent& c : components_) {
    if (c.scale > 0.0 && c.base.total_mass() > 0.0) return false;
  }
  return true;
}

namespace {

// Product of a weight and a test function. Overflow at the last representable
// nodes next to an integrable endpoint is dropped.
double endpoint_product(double h, double g, double gap) {
  const double v = h * g;
  if (!std::isfinite(v) && gap < 1e-150) return 0.0;
  return v;
}

}  // namespace

double JumpMeasure::density_weight(std::size_t k, double x, double w) const {
  const JumpComponent& c = components_[k];
  if (!has_density(c)) return 0.0;
  const Density& d = *c.base.density();
  if (d.kind() == Density::Kind::kBeta) {
    const DensityForm f = density_form(c);
    return f.k * power_weight(x, w, f.p, f.q);
  }
  const double v = d(x, w);
  if (v == 0.0) return 0.0;
  return c.scale * v * power_weight(x, w, c.pow_x, c.pow_1mx);
}

double JumpMeasure::integrate(
    const std::function<double(double, double, double)>& phi,
    const QuadratureOptions& opts) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const JumpComponent& c = components_[k];
    if (c.scale == 0.0) continue;
    for (const Atom& a : c.base.atoms()) {
      const double w = 1.0 - a.x;
      const double weight = c.scale * a.mass * power_weight(a.x, w, c.pow_x, c.pow_1mx);
      if (weight == 0.0) continue;
      sum += weight * phi(neglog(a.x, w), a.x, w);
    }
    if (!has_density(c)) continue;
    // Test functions vanish at y = 0 when the mass there is infinite.
    const DensityForm form = density_form(c);
    sum += integrate_unit_singular(
        [&](double x, double w) {
          const double h = density_weight(k, x, w);
          if (h == 0.0) return 0.0;
          return endpoint_product(h, phi(neglog(x, w), x, w), std::min(x, w));
        },
        form.p, form.q > -1.0 ? form.q : form.q + 1.0, opts);
  }
  return sum;
}

double JumpMeasure::total_mass(const QuadratureOptions& opts) const {
  if (infinite_) return kInf;
  return integrate([](double, double, double) { return 1.0; }, opts);
}

std::vector<Atom> JumpMeasure::y_atoms() const {
  std::vector<Atom> out;
  for (const JumpComponent& c : components_) {
    for (const Atom& a : c.base.atoms()) {
      const double w = 1.0 - a.x;
      const double weight = c.scale * a.mass * power_weight(a.x, w, c.pow_x, c.pow_1mx);
      if (weight > 0.0) out.push_back({neglog(a.x, w), weight});
    }
  }
  return out;
}

JumpMeasure JumpMeasure::scaled(double factor) const {
  std::vector<JumpComponent> comps = components_;
  for (JumpComponent& c : comps) c.scale *= factor;
  return JumpMeasure(std::move(comps));
}

void JumpMeasure::append(const JumpMeasure& other, double weight) {
  std::vector<JumpComponent> comps = components_;
  for (JumpComponent c : other.components_) {
    c.scale *= weight;
    comps.push_back(std::move(c));
  }
  *this = JumpMeasure(std::move(comps));
}

// ---------------------------------------------------------------------------
// LaplaceExponent

LaplaceExponent::LaplaceExponent(double killing, double drift, JumpMeasure jumps,
                                 QuadratureOptions opts)
    : killing_(killing), drift_(drift), jumps_(std::move(jumps)), opts_(opts) {
  if (!(killing >= 0.0) || !(drift >= 0.0) || !std::isfinite(killing) ||
      !std::isfinite(drift)) {
    throw ValidationError("killing and drift must be finite and >= 0");
  }
}

double LaplaceExponent::operator()(double q) const {
  if (!(q >= 0.0)) throw ValidationError("Laplace exponent needs q >= 0");
  double value = killing_ + drift_ * q;
  if (q == 0.0 || jumps_.empty()) return value;
  value += jumps_.integrate(
      [q](double, double x, double w) { return one_minus_pow(x, w, q); }, opts_);
  return value;
}

bool LaplaceExponent::trivial() const noexcept {
  return killing_ == 0.0 && drift_ == 0.0 && jumps_.empty();
}

LaplaceExponent LaplaceExponent::mixture(std::span<const double> weights,
                                         std::span<const LaplaceExponent> parts) {
  if (weights.size() != parts.size()) {
    throw ValidationError("mixture weights and parts differ in length");
  }
  double k = 0.0;
  double c = 0.0;
  JumpMeasure pi;
  QuadratureOptions opts;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw ValidationError("mixture weights must be >= 0");
    k += weights[i] * parts[i].killing();
    c += weights[i] * parts[i].drift();
    pi.append(parts[i].jumps(), weights[i]);
    opts = parts[i].options();
  }
  return LaplaceExponent(k, c, std::move(pi), opts);
}

LaplaceExponent laplace_exponent_from_measure(const FiniteMeasure& mu,
                                              const QuadratureOptions& opts) {
  Pushforward pf = pushforward_neglog(mu.restricted_open(), true, opts);
  return LaplaceExponent(mu.atom_mass(0.0), mu.atom_mass(1.0),
                         std::move(pf.measure), opts);
}

Pushforward pushforward_neglog(const FiniteMeasure& mu, bool reweight,
                               const QuadratureOptions& opts) {
  if (mu.atom_mass(0.0) > 0.0 || mu.atom_mass(1.0) > 0.0) {
    throw ValidationError(
        "pushforward_neglog: atoms at 0 or 1 belong to killing or drift");
  }
  Pushforward out;
  if (mu.empty()) return out;
  out.measure = JumpMeasure({JumpComponent{mu, 0.0, reweight ? -1.0 : 0.0, 1.0}});
  out.infinite = out.measure.infinite_activity();
  out.total_mass = out.measure.total_mass(opts);
  return out;
}

// ---------------------------------------------------------------------------
// JumpSampler

namespace {

double softplus(double d) {
  return d > 30.0 ? d + std::log1p(std::exp(-d)) : std::log1p(std::exp(d));
}

double truncated_variance(const JumpMeasure& pi, double epsilon,
                          const QuadratureOptions& opts, int power) {
  const double w_eps = -std::expm1(-epsilon);
  double sum = 0.0;
  for (std::size_t k = 0; k < pi.components().size(); ++k) {
    if (!needs_truncation(pi.components()[k])) continue;
    // Integrate over u = 1 - x in (0, w_eps], where u itself is accurate.
    sum += integrate_unit_range(
        [&](double u, double) {
          const double x = 1.0 - u;
          const double h = pi.density_weight(k, x, u);
          if (h == 0.0) return 0.0;
          return endpoint_product(h, std::pow(-std::log1p(-u), power), u);
        },
        0.0, w_eps, opts);
  }
  return sum;
}

}  // namespace

double JumpSampler::default_epsilon(const JumpMeasure& pi, double variance_target,
                                    const QuadratureOptions& opts) {
  bool any = false;
  for (const JumpComponent& c : pi.components()) any = any || needs_truncation(c);
  if (!any) return 0.0;
  double eps = 1.0;
  for (int k = 0; k < 200; ++k) {
    if (truncated_variance(pi, eps, opts, 2) < variance_target) return eps;
    eps *= 0.5;
  }
  throw ConfigurationError("no small-jump cutoff reaches the variance target");
}

JumpSampler::JumpSampler(const JumpMeasure& pi, double epsilon,
                         const QuadratureOptions& opts)
    : pi_(pi), epsilon_(epsilon) {
  if (!(epsilon >= 0.0)) throw ConfigurationError("epsilon must be >= 0");
  for (std::size_t k = 0; k < pi_.components().size(); ++k) {
    const JumpComponent& c = pi_.components()[k];
    if (c.scale == 0.0) continue;
    for (const Atom& a : c.base.atoms()) {
      const double w = 1.0 - a.x;
      const double weight = c.scale * a.mass * power_weight(a.x, w, c.pow_x, c.pow_1mx);
      if (weight > 0.0) {
        Piece piece{PieceKind::kAtom, weight};
        piece.y = neglog(a.x, w);
        pieces_.push_back(piece);
      }
    }
    if (!has_density(c)) continue;
    const DensityForm f = density_form(c);
    if (f.q > -1.0) {
      if (!f.tabulated) {
        Piece piece{PieceKind::kBeta, f.k * boost::math::beta(f.p + 1.0, f.q + 1.0)};
        piece.component = k;
        piece.p = f.p;
        piece.q = f.q;
        pieces_.push_back(piece);
      } else {
        if (!(f.p > -1.0)) {
          throw ConfigurationError("tabulated jump density unsupported near x = 0");
        }
        const double mass = integrate_unit(
            [&](double x, double w) { return pi_.density_weight(k, x, w); }, opts);
        Piece piece{PieceKind::kThinned, mass};
        piece.component = k;
        piece.p = f.p;
        piece.q = f.q;
        piece.bound = c.base.density()->max_value();
        pieces_.push_back(piece);
      }
      continue;
    }
    if (epsilon == 0.0) {
      throw ConfigurationError(
          pi_.infinite_activity()
              ? "epsilon = 0 requested for an infinite-activity jump measure"
              : "jump density singular at small jumps needs epsilon > 0");
    }
    if (f.tabulated && !(f.p > -1.0)) {
      throw ConfigurationError("tabulated jump density unsupported near x = 0");
    }
    const double x_eps = std::exp(-epsilon);
    const double w_eps = -std::expm1(-epsilon);
    const double g_bound = f.tabulated ? c.base.density()->max_value() : 1.0;

    const double xl = std::min(0.5, x_eps);
    Piece left{PieceKind::kLeft,
               integrate_unit_range(
                   [&](double x, double w) { return pi_.density_weight(k, x, w); },
                   0.0, xl, opts)};
    left.component = k;
    left.p = f.p;
    left.q = f.q;
    left.lo = 0.0;
    left.hi = xl;
    left.bound = std::pow(1.0 - xl, f.q) * g_bound;
    if (left.mass > 0.0) pieces_.push_back(left);

    if (x_eps > 0.5) {
      Piece right{PieceKind::kRight,
                  integrate_log_scale(
                      [&](double w) { return pi_.density_weight(k, 1.0 - w, w); },
                      w_eps, 0.5, opts)};
      right.component = k;
      right.p = f.p;
      right.q = f.q;
      right.lo = w_eps;
      right.hi = 0.5;
      right.bound = (f.p >= 0.0 ? 1.0 : std::pow(0.5, f.p)) * g_bound;
      if (right.mass > 0.0) pieces_.push_back(right);
    }
  }
  for (const Piece& p : pieces_) {
    weights_.push_back(p.mass);
    rate_ += p.mass;
  }
  if (epsilon > 0.0) {
    drift_ = truncated_variance(pi_, epsilon, opts, 1);
    variance_ = truncated_variance(pi_, epsilon, opts, 2);
  }
}

double JumpSampler::thinning(const Piece& piece, double x, double w) const {
  const JumpComponent& c = pi_.components()[piece.component];
  const Density& d = *c.base.density();
  return d.kind() == Density::Kind::kTabulated ? d(x, w) : 1.0;
}

double JumpSampler::sample(Stream& rng) const {
  const Piece& piece = pieces_[rng.categorical(weights_)];
  switch (piece.kind) {
    case PieceKind::kAtom:
      return piece.y;
    case PieceKind::kBeta: {
      const double lx = rng.log_gamma_variate(piece.p + 1.0);
      const double lw = rng.log_gamma_variate(piece.q + 1.0);
      return softplus(lw - lx);
    }
    case PieceKind::kThinned:
      for (;;) {
        const double lx = rng.log_gamma_variate(piece.p + 1.0);
        const double lw = rng.log_gamma_variate(piece.q + 1.0);
        const double x = 1.0 / (1.0 + std::exp(lw - lx));
        const double w = 1.0 / (1.0 + std::exp(lx - lw));
        if (rng.uniform() * piece.bound < thinning(piece, x, w)) {
          return softplus(lw - lx);
        }
      }
    case PieceKind::kLeft:
      for (;;) {
        const double x =
            std::exp(std::log(piece.hi) + std::log(rng.uniform()) / (piece.p + 1.0));
        const double w = 1.0 - x;
        const double accept = std::pow(w, piece.q) * thinning(piece, x, w);
        if (rng.uniform() * piece.bound < accept) return -std::log(x);
      }
    case PieceKind::kRight:
      for (;;) {
        double w;
        const double u = rng.uniform();
        const double e = piece.q + 1.0;
        if (std::abs(e) < 1e-12) {
          w = piece.lo * std::exp(u * std::log(piece.hi / piece.lo));
        } else {
          const double lo = std::pow(piece.lo, e);
          const double hi = std::pow(piece.hi, e);
          w = std::pow(lo + u * (hi - lo), 1.0 / e);
        }
        const double x = 1.0 - w;
        const double accept = std::pow(x, piece.p) * thinning(piece, x, w);
        if (rng.uniform() * piece.bound < accept) return -std::log1p(-w);
      }
  }
  return 0.0;
}

}  // namespace maplim
