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

#include "maplim/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include "maplim/error.hpp"
#include "maplim/regimes.hpp"

namespace maplim {
namespace {

constexpr double kRowTol = 1e-12;

void check_stochastic(const std::vector<std::vector<double>>& p, const char* what) {
  if (p.empty()) throw ValidationError(std::string(what) + " must be non-empty");
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i].size() != p.size()) {
      throw ValidationError(std::string(what) + " must be square");
    }
    double sum = 0.0;
    for (double v : p[i]) {
      if (!(v >= 0.0)) {
        throw ValidationError(std::string(what) + " entries must be >= 0");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowTol) {
      throw ValidationError(std::string(what) + " row " + std::to_string(i + 1) +
                            " does not sum to 1");
    }
  }
}

QMatrix generator_of(const std::vector<std::vector<double>>& p) {
  std::vector<std::vector<double>> q = p;
  for (std::size_t i = 0; i < q.size(); ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) {
      if (j != i) off += q[i][j];
    }
    q[i][i] = -off;
  }
  return QMatrix(std::move(q));
}

double log_choose(std::int64_t n, std::int64_t k) {
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace

// ---------------------------------------------------------------------------
// PositionLaw

std::int64_t PositionLaw::sample(std::int64_t n, Stream& rng) const {
  const double p = move_probability(n);
  if (p <= 0.0) return n;
  if (p >= 1.0 || rng.bernoulli(p)) return sample_move(n, rng);
  return n;
}

ScaledJumpLaw::ScaledJumpLaw(double ratio, double rate, double exponent)
    : ratio_(ratio), rate_(rate), exponent_(exponent) {
  if (!(ratio >= 0.0 && ratio < 1.0)) {
    throw ValidationError("scaled jump ratio must lie in [0, 1)");
  }
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw ValidationError("scaled jump rate must be positive");
  }
  if (!(exponent > 0.0) || !std::isfinite(exponent)) {
    throw ValidationError("scaled jump exponent must be positive");
  }
}

std::int64_t ScaledJumpLaw::target(std::int64_t n) const {
  return static_cast<std::int64_t>(std::floor(static_cast<double>(n) * ratio_));
}

double ScaledJumpLaw::move_probability(std::int64_t n) const {
  if (n <= 0) return 0.0;
  return std::min(1.0, rate_ * std::pow(static_cast<double>(n), -exponent_));
}

std::vector<std::pair<std::int64_t, double>> ScaledJumpLaw::row(
    std::int64_t n) const {
  const double p = move_probability(n);
  if (p <= 0.0) return {{n, 1.0}};
  if (p >= 1.0) return {{target(n), 1.0}};
  return {{target(n), p}, {n, 1.0 - p}};
}

std::int64_t ScaledJumpLaw::sample_move(std::int64_t n, Stream&) const {
  return target(n);
}

// ---------------------------------------------------------------------------
// TypeMatrixFamily

TypeMatrixFamily TypeMatrixFamily::constant(std::vector<std::vector<double>> p) {
  check_stochastic(p, "type matrix");
  TypeMatrixFamily f;
  f.kappa_ = static_cast<int>(p.size());
  f.constant_ = true;
  f.q_ = generator_of(p);
  f.p_ = std::move(p);
  return f;
}

TypeMatrixFamily TypeMatrixFamily::perturbed(QMatrix q, double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw ValidationError("perturbation exponent beta must be >= 0");
  }
  if (q.kappa() < 1) throw ValidationError("generator must be non-empty");
  TypeMatrixFamily f;
  f.kappa_ = q.kappa();
  f.constant_ = false;
  f.beta_ = beta;
  double max_rate = 0.0;
  for (int i = 1; i <= q.kappa(); ++i) max_rate = std::max(max_rate, -q.rate(i, i));
  f.h_cap_ = max_rate > 0.0 ? 1.0 / max_rate : 1.0;
  f.q_ = std::move(q);
  return f;
}

double TypeMatrixFamily::h(std::int64_t n) const {
  if (n <= 0) return h_cap_;
  return std::min(std::pow(static_cast<double>(n), -beta_), h_cap_);
}

double TypeMatrixFamily::entry(std::int64_t n, int i, int j) const {
  if (constant_) return p_.at(i - 1).at(j - 1);
  const double hn = h(n);
  return i == j ? 1.0 + hn * q_.rate(i, i) : hn * q_.rate(i, j);
}

double TypeMatrixFamily::leave(std::int64_t n, int i) const {
  if (constant_) {
    double off = 0.0;
    for (int j = 1; j <= kappa_; ++j) {
      if (j != i) off += p_[i - 1][j - 1];
    }
    return off;
  }
  return -h(n) * q_.rate(i, i);
}

std::vector<std::vector<double>> TypeMatrixFamily::at(std::int64_t n) const {
  std::vector<std::vector<double>> p(kappa_, std::vector<double>(kappa_));
  for (int i = 1; i <= kappa_; ++i) {
    for (int j = 1; j <= kappa_; ++j) p[i - 1][j - 1] = entry(n, i, j);
  }
  return p;
}

// ---------------------------------------------------------------------------
// ProductKernel

ProductKernel::ProductKernel(std::vector<std::shared_ptr<const PositionLaw>> laws,
                             TypeMatrixFamily types)
    : laws_(std::move(laws)), types_(std::move(types)) {
  if (static_cast<int>(laws_.size()) != types_.kappa()) {
    throw ValidationError("product kernel needs one position law per type");
  }
  for (const auto& l : laws_) {
    if (!l) throw ValidationError("product kernel position law is null");
  }
}

bool ProductKernel::is_absorbing(std::int64_t position) const {
  for (const auto& l : laws_) {
    if (!l->is_absorbing(position)) return false;
  }
  return true;
}

std::vector<RowEntry> ProductKernel::row(State s) const {
  if (is_absorbing(s.position)) return {{s.position, s.type, 1.0}};
  const auto law_row = law(s.type).row(s.position);
  std::vector<RowEntry> out;
  for (int j = 1; j <= kappa(); ++j) {
    const double pij = types_.entry(s.position, s.type, j);
    if (pij <= 0.0) continue;
    for (const auto& [m, pm] : law_row) {
      if (pm > 0.0) out.push_back({m, j, pij * pm});
    }
  }
  return out;
}

std::int64_t ProductKernel::support_size(State s) const {
  if (is_absorbing(s.position)) return 1;
  std::int64_t types = 0;
  for (int j = 1; j <= kappa(); ++j) {
    if (types_.entry(s.position, s.type, j) > 0.0) ++types;
  }
  return types * law(s.type).support_size(s.position);
}

double ProductKernel::leave_probability(State s) const {
  if (is_absorbing(s.position)) return 0.0;
  const double off = types_.leave(s.position, s.type);
  return off + (1.0 - off) * law(s.type).move_probability(s.position);
}

State ProductKernel::sample(State s, Stream& rng) const {
  if (is_absorbing(s.position)) return s;
  const double leave = leave_probability(s);
  if (leave <= 0.0) return s;
  if (leave >= 1.0 || rng.uniform() < leave) return sample_departure(s, rng);
  return s;
}

State ProductKernel::sample_departure(State s, Stream& rng) const {
  const double off = types_.leave(s.position, s.type);
  const double leave = leave_probability(s);
  if (!(leave > 0.0)) {
    throw ValidationError("departure requested from a state that cannot move");
  }
  const PositionLaw& l = law(s.type);
  if (rng.uniform() * leave < off) {
    std::vector<double> w(kappa());
    for (int j = 1; j <= kappa(); ++j) {
      w[j - 1] = j == s.type ? 0.0 : types_.entry(s.position, s.type, j);
    }
    const int j = static_cast<int>(rng.categorical(w)) + 1;
    return {l.sample(s.position, rng), j};
  }
  return {l.sample_move(s.position, rng), s.type};
}

// ---------------------------------------------------------------------------
// Coalescents

void CoalescentEnvSpec::validate() const {
  if (lambda.empty()) throw ValidationError("coalescent needs at least one measure");
  if (static_cast<int>(lambda.size()) != types.kappa()) {
    throw ValidationError("coalescent needs one measure per type");
  }
  for (const FiniteMeasure& l : lambda) {
    if (!(l.total_mass() > 0.0)) {
      throw ValidationError("coalescence measure must be non-zero");
    }
  }
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw ValidationError("coalescent index gamma must lie in (0, 1)");
  }
}

CoalescentPositionLaw::CoalescentPositionLaw(FiniteMeasure lambda,
                                             QuadratureOptions opts)
    : lambda_(std::move(lambda)), opts_(opts) {
  if (!(lambda_.total_mass() > 0.0)) {
    throw ValidationError("coalescence measure must be non-zero");
  }
  for (const Atom& a : lambda_.atoms()) {
    if (a.mass > 0.0 && a.x <= 0.0) {
      throw ValidationError("coalescence measure must not charge 0");
    }
    Piece p;
    p.kind = Piece::Kind::kAtom;
    p.x = a.x;
    p.scale = a.mass;
    pieces_.push_back(p);
  }
  if (lambda_.density()) {
    const Density& d = *lambda_.density();
    if (d.mass() > 0.0) {
      if (d.kind() == Density::Kind::kBeta) {
        Piece p;
        p.kind = Piece::Kind::kBeta;
        p.a = d.a();
        p.b = d.b();
        p.scale = d.scale();
        pieces_.push_back(p);
      } else {
        Piece p;
        p.kind = Piece::Kind::kTabulated;
        p.density = d;
        pieces_.push_back(p);
      }
    }
  }
  rate_cache_.resize(pieces_.size());
}

double CoalescentPositionLaw::tail_moment(std::size_t k, std::int64_t power) const {
  const Piece& p = pieces_[k];
  const double e = static_cast<double>(power);
  switch (p.kind) {
    case Piece::Kind::kAtom:
      return p.scale * std::pow(1.0 - p.x, e);
    case Piece::Kind::kBeta:
      return p.scale * std::exp(log_beta(p.a, p.b + e) - log_beta(p.a, p.b));
    case Piece::Kind::kTabulated: {
      const Density& d = *p.density;
      return integrate_unit(
          [&](double x, double w) { return d(x, w) * std::pow(w, e); }, opts_);
    }
  }
  return 0.0;
}

double CoalescentPositionLaw::piece_rate(std::size_t k, std::int64_t n) const {
  if (n <= 1) return 0.0;
  std::lock_guard<std::mutex> lock(mutex_);
  std::vector<double>& g = rate_cache_[k];
  if (g.empty()) g = {0.0, 0.0, tail_moment(k, 0)};
  // g_{m+1} = g_m + m int (1 - x)^{m-1} Lambda(dx)
  while (static_cast<std::int64_t>(g.size()) <= n) {
    const auto m = static_cast<std::int64_t>(g.size()) - 1;
    g.push_back(g.back() + static_cast<double>(m) * tail_moment(k, m - 1));
  }
  return g[n];
}

double CoalescentPositionLaw::total_rate(std::int64_t n) const {
  double g = 0.0;
  for (std::size_t k = 0; k < pieces_.size(); ++k) g += piece_rate(k, n);
  return g;
}

std::vector<double> CoalescentPositionLaw::piece_terms(std::size_t k,
                                                       std::int64_t n) const {
  std::vector<double> t(static_cast<std::size_t>(n - 1), 0.0);
  const Piece& p = pieces_[k];
  const double nd = static_cast<double>(n);
  switch (p.kind) {
    case Piece::Kind::kAtom: {
      if (p.x == 0.0) {
        t[0] = p.scale * nd * (nd - 1.0) / 2.0;
      } else if (p.x == 1.0) {
        t.back() = p.scale;
      } else {
        const double lx = std::log(p.x);
        const double lw = std::log1p(-p.x);
        for (std::int64_t b = 2; b <= n; ++b) {
          t[b - 2] = std::exp(log_choose(n, b) + static_cast<double>(b - 2) * lx +
                              static_cast<double>(n - b) * lw + std::log(p.scale));
        }
      }
      break;
    }
    case Piece::Kind::kBeta: {
      double term = p.scale * nd * (nd - 1.0) / 2.0 *
                    std::exp(log_beta(p.a, p.b + nd - 2.0) - log_beta(p.a, p.b));
      for (std::int64_t b = 2; b <= n; ++b) {
        t[b - 2] = term;
        const double bd = static_cast<double>(b);
        term *= (nd - bd) / (bd + 1.0) * (p.a + bd - 2.0) / (p.b + nd - bd - 1.0);
      }
      break;
    }
    case Piece::Kind::kTabulated: {
      {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = table_cache_.find({k, n});
        if (it != table_cache_.end()) return it->second;
      }
      const Density& d = *p.density;
      for (std::int64_t b = 2; b <= n; ++b) {
        const double lc = log_choose(n, b);
        const double eb = static_cast<double>(b - 2);
        const double ew = static_cast<double>(n - b);
        t[b - 2] = integrate_unit(
            [&](double x, double w) {
              const double v = d(x, w);
              if (v == 0.0) return 0.0;
              const double lx = eb == 0.0 ? 0.0 : eb * std::log(x);
              const double lw = ew == 0.0 ? 0.0 : ew * std::log(w);
              return v * std::exp(lc + lx + lw);
            },
            opts_);
      }
      std::lock_guard<std::mutex> lock(mutex_);
      table_cache_[{k, n}] = t;
      break;
    }
  }
  return t;
}

std::vector<std::pair<std::int64_t, double>> CoalescentPositionLaw::row(
    std::int64_t n) const {
  if (n <= 1) return {{n, 1.0}};
  std::vector<double> sum(static_cast<std::size_t>(n - 1), 0.0);
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const std::vector<double> t = piece_terms(k, n);
    for (std::size_t b = 0; b < t.size(); ++b) sum[b] += t[b];
  }
  const double g = total_rate(n);
  std::vector<std::pair<std::int64_t, double>> out;
  out.reserve(sum.size());
  // b = n merges everything into one block.
  for (std::int64_t b = n; b >= 2; --b) {
    out.emplace_back(n - b + 1, sum[b - 2] / g);
  }
  return out;
}

std::int64_t CoalescentPositionLaw::sample_piece(std::size_t k, std::int64_t n,
                                                 Stream& rng) const {
  const Piece& p = pieces_[k];
  const double nd = static_cast<double>(n);
  switch (p.kind) {
    case Piece::Kind::kAtom: {
      if (p.x == 0.0) return 2;
      if (p.x == 1.0) return n;
      if (nd * p.x > 10.0) {
        // Binomial(n, x) conditioned on at least two successes.
        std::binomial_distribution<std::int64_t> bin(n, p.x);
        for (;;) {
          const std::int64_t b = bin(rng);
          if (b >= 2) return b;
        }
      }
      const double ratio = p.x / (1.0 - p.x);
      double term = nd * (nd - 1.0) / 2.0 * std::pow(1.0 - p.x, nd - 2.0);
      double target = rng.uniform() * piece_rate(k, n) / p.scale;
      for (std::int64_t b = 2; b < n; ++b) {
        target -= term;
        if (target < 0.0) return b;
        const double bd = static_cast<double>(b);
        term *= (nd - bd) / (bd + 1.0) * ratio;
      }
      return n;
    }
    case Piece::Kind::kBeta: {
      double term = p.scale * nd * (nd - 1.0) / 2.0 *
                    std::exp(log_beta(p.a, p.b + nd - 2.0) - log_beta(p.a, p.b));
      double target = rng.uniform() * piece_rate(k, n);
      for (std::int64_t b = 2; b < n; ++b) {
        target -= term;
        if (target < 0.0) return b;
        const double bd = static_cast<double>(b);
        term *= (nd - bd) / (bd + 1.0) * (p.a + bd - 2.0) / (p.b + nd - bd - 1.0);
      }
      return n;
    }
    case Piece::Kind::kTabulated: {
      const std::vector<double> t = piece_terms(k, n);
      return static_cast<std::int64_t>(rng.categorical(t)) + 2;
    }
  }
  return 2;
}

std::int64_t CoalescentPositionLaw::sample_move(std::int64_t n, Stream& rng) const {
  if (n <= 1) throw ValidationError("coalescent with one block cannot move");
  std::size_t k = 0;
  if (pieces_.size() > 1) {
    std::vector<double> w(pieces_.size());
    for (std::size_t c = 0; c < pieces_.size(); ++c) w[c] = piece_rate(c, n);
    k = rng.categorical(w);
  }
  return n - sample_piece(k, n, rng) + 1;
}

std::shared_ptr<ProductKernel> coalescent_kernel(const CoalescentEnvSpec& spec) {
  spec.validate();
  std::vector<std::shared_ptr<const PositionLaw>> laws;
  for (const FiniteMeasure& l : spec.lambda) {
    laws.push_back(std::make_shared<CoalescentPositionLaw>(l));
  }
  return std::make_shared<ProductKernel>(std::move(laws), spec.types);
}

TailEstimate tail_constant(const FiniteMeasure& lambda, double gamma,
                           const QuadratureOptions& opts) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw ValidationError("tail index gamma must lie in (0, 1)");
  }
  const std::optional<Density>& d = lambda.density();
  auto atoms_above = [&](double u) {
    double s = 0.0;
    for (const Atom& a : lambda.atoms()) {
      if (a.x >= u && a.x > 0.0) s += a.mass / (a.x * a.x);
    }
    return s;
  };
  TailEstimate est;
  constexpr int kFirst = 8;
  constexpr int kLast = 48;
  double u_prev = 0.1;
  double dens = 0.0;
  if (d) {
    dens = integrate_unit_range(
        [&](double x, double w) { return (*d)(x, w) / (x * x); }, 0.1, 1.0, opts);
  }
  for (int j = kFirst; j <= kLast; ++j) {
    const double u = std::pow(10.0, -static_cast<double>(j) / 8.0);
    if (d && j > kFirst) {
      dens += integrate_smooth(
          [&](double x) { return (*d)(x, 1.0 - x) / (x * x); }, u, u_prev, opts);
    }
    u_prev = u;
    est.grid.emplace_back(u, std::pow(u, gamma) * (dens + atoms_above(u)));
  }
  est.c = est.grid.back().second;
  if (est.c > 0.0) {
    for (std::size_t k = est.grid.size() - 9; k < est.grid.size(); ++k) {
      est.oscillation =
          std::max(est.oscillation, std::abs(est.grid[k].second / est.c - 1.0));
    }
    est.regular = est.oscillation <= 0.1;
  }
  return est;
}

LaplaceExponent coalescent_limit_psi(const FiniteMeasure& lambda, double gamma,
                                     double c, const QuadratureOptions& opts) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw ValidationError("coalescent index gamma must lie in (0, 1)");
  }
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw ValidationError("tail constant must be positive and finite");
  }
  try {
    JumpMeasure pi({JumpComponent{lambda.reflected(), 0.0, -2.0,
                                  1.0 / (std::tgamma(2.0 - gamma) * c)}});
    LaplaceExponent psi(0.0, 0.0, std::move(pi), opts);
    psi(1.0);
    return psi;
  } catch (const ValidationError& e) {
    throw HypothesisViolation(std::string("coalescent limit undefined: ") + e.what());
  } catch (const QuadratureError& e) {
    throw HypothesisViolation(std::string("coalescent limit diverges: ") + e.what());
  }
}

MapCharacteristics coalescent_limit(const CoalescentEnvSpec& spec, int start_type,
                                    std::vector<double> c) {
  spec.validate();
  const int kappa = spec.types.kappa();
  if (start_type < 1 || start_type > kappa) {
    throw ValidationError("start type outside 1.." + std::to_string(kappa));
  }
  if (c.empty()) {
    for (const FiniteMeasure& l : spec.lambda) {
      const TailEstimate t = tail_constant(l, spec.gamma);
      if (!t.regular) {
        throw HypothesisViolation("coalescence measure is not regularly varying at 0 "
                                  "with the requested index");
      }
      c.push_back(t.c);
    }
  }
  if (static_cast<int>(c.size()) != kappa) {
    throw ValidationError("need one tail constant per environment");
  }
  std::vector<LaplaceExponent> psi;
  for (int i = 0; i < kappa; ++i) {
    psi.push_back(coalescent_limit_psi(spec.lambda[i], spec.gamma, c[i]));
  }
  const double beta = spec.types.is_constant() ? 0.0 : spec.types.beta();
  if (kappa == 1) return MapCharacteristics::monotype(psi[0]);
  switch (classify_regime(beta, spec.gamma)) {
    case Regime::kCritical: {
      MapCharacteristics out;
      out.kappa = kappa;
      out.psi = std::move(psi);
      out.lambda.assign(kappa, std::vector<double>(kappa, 0.0));
      out.switch_jumps.assign(kappa, std::vector<SwitchLaw>(kappa));
      for (int i = 1; i <= kappa; ++i) {
        for (int j = 1; j <= kappa; ++j) {
          if (i != j) out.lambda[i - 1][j - 1] = spec.types.generator().rate(i, j);
        }
      }
      out.validate();
      return out;
    }
    case Regime::kMixing: {
      const std::vector<double> pi = stationary_distribution(spec.types.generator());
      return MapCharacteristics::monotype(LaplaceExponent::mixture(pi, psi));
    }
    case Regime::kSolo:
      return MapCharacteristics::monotype(psi[start_type - 1]);
  }
  return MapCharacteristics::monotype(psi[start_type - 1]);
}

CollisionCount count_collisions(const ProductKernel& kernel, std::int64_t n,
                                int type, Stream& rng) {
  if (n < 1) throw ValidationError("block count must be >= 1");
  ChainRunResult r = run_chain(kernel, {n, type}, rng);
  return {r.absorption_time, std::move(r.path)};
}

CollisionCount count_collisions(const CoalescentEnvSpec& spec, std::int64_t n,
                                int type, Stream& rng) {
  return count_collisions(*coalescent_kernel(spec), n, type, rng);
}

// ---------------------------------------------------------------------------
// Barrier walks

IncrementLaw IncrementLaw::geometric(double p) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw ValidationError("geometric increment parameter must lie in (0, 1]");
  }
  IncrementLaw l;
  l.kind_ = Kind::kGeometric;
  l.param_ = p;
  return l;
}

IncrementLaw IncrementLaw::polynomial_tail(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ValidationError("polynomial tail exponent must be positive");
  }
  IncrementLaw l;
  l.kind_ = Kind::kPolynomial;
  l.param_ = alpha;
  return l;
}

IncrementLaw IncrementLaw::table(std::vector<double> probs) {
  if (probs.empty()) throw ValidationError("increment table must be non-empty");
  double sum = 0.0;
  for (double v : probs) {
    if (!(v >= 0.0)) throw ValidationError("increment table entries must be >= 0");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kRowTol) {
    throw ValidationError("increment table must sum to 1");
  }
  IncrementLaw l;
  l.kind_ = Kind::kTable;
  l.tails_.assign(probs.size(), 0.0);
  double acc = 0.0;
  for (std::size_t k = probs.size(); k-- > 0;) {
    l.tails_[k] = acc;
    acc += probs[k];
  }
  l.probs_ = std::move(probs);
  return l;
}

double IncrementLaw::tail(std::int64_t k) const {
  if (k < 0) return 1.0;
  switch (kind_) {
    case Kind::kGeometric:
      if (param_ == 1.0) return k == 0 ? 1.0 : 0.0;
      return std::exp(static_cast<double>(k) * std::log1p(-param_));
    case Kind::kPolynomial:
      return std::exp(-param_ * std::log1p(static_cast<double>(k)));
    case Kind::kTable:
      return k >= static_cast<std::int64_t>(tails_.size()) ? 0.0 : tails_[k];
  }
  return 0.0;
}

double IncrementLaw::pmf(std::int64_t k) const {
  if (k < 0) return 0.0;
  if (kind_ == Kind::kTable) {
    return k < static_cast<std::int64_t>(probs_.size()) ? probs_[k] : 0.0;
  }
  if (k == 0) return 0.0;
  if (kind_ == Kind::kGeometric) {
    return param_ * tail(k - 1);
  }
  // (k)^{-a} - (k+1)^{-a} = k^{-a} (1 - (1 + 1/k)^{-a})
  const double kd = static_cast<double>(k);
  return std::pow(kd, -param_) * -std::expm1(-param_ * std::log1p(1.0 / kd));
}

double IncrementLaw::prob_between(std::int64_t lo, std::int64_t hi) const {
  if (lo < 0 || lo > 1) throw ValidationError("lower bound must be 0 or 1");
  if (hi < lo) return 0.0;
  if (lo == 0) return pmf(0) + prob_between(1, hi);
  switch (kind_) {
    case Kind::kGeometric:
      if (param_ == 1.0) return 1.0;
      return -std::expm1(static_cast<double>(hi) * std::log1p(-param_));
    case Kind::kPolynomial:
      return -std::expm1(-param_ * std::log1p(static_cast<double>(hi)));
    case Kind::kTable: {
      double s = 0.0;
      const auto top = std::min<std::int64_t>(hi, static_cast<std::int64_t>(probs_.size()) - 1);
      for (std::int64_t k = 1; k <= top; ++k) s += probs_[k];
      return s;
    }
  }
  return 0.0;
}

double IncrementLaw::mean() const {
  switch (kind_) {
    case Kind::kGeometric:
      return 1.0 / param_;
    case Kind::kPolynomial:
      return param_ > 1.0 ? boost::math::zeta(param_)
                          : std::numeric_limits<double>::infinity();
    case Kind::kTable: {
      double m = 0.0;
      for (std::size_t k = 0; k < probs_.size(); ++k) m += static_cast<double>(k) * probs_[k];
      return m;
    }
  }
  return 0.0;
}

double IncrementLaw::tail_limit(double gamma) const {
  if (kind_ != Kind::kPolynomial || param_ > gamma) return 0.0;
  if (param_ == gamma) return 1.0;
  return std::numeric_limits<double>::infinity();
}

std::int64_t IncrementLaw::sample_between(std::int64_t lo, std::int64_t hi,
                                          Stream& rng) const {
  const double mass = prob_between(lo, hi);
  if (!(mass > 0.0)) {
    throw ValidationError("increment conditioned on an empty range");
  }
  if (kind_ == Kind::kTable) {
    double target = rng.uniform() * mass;
    const auto top = std::min<std::int64_t>(hi, static_cast<std::int64_t>(probs_.size()) - 1);
    for (std::int64_t k = lo; k <= top; ++k) {
      target -= probs_[k];
      if (target < 0.0) return k;
    }
    for (std::int64_t k = top; k >= lo; --k) {
      if (probs_[k] > 0.0) return k;
    }
    return lo;
  }
  // Inversion on the tail: return the smallest k with tail(k) <= T.
  const std::int64_t start = std::max<std::int64_t>(lo, 1);
  const double t = tail(start - 1) - rng.uniform() * mass;
  if (!(t > 0.0)) return hi;
  double k = 0.0;
  if (kind_ == Kind::kGeometric) {
    if (param_ == 1.0) return start;
    k = std::ceil(std::log(t) / std::log1p(-param_));
  } else {
    k = std::ceil(std::pow(t, -1.0 / param_) - 1.0);
  }
  if (!(k >= static_cast<double>(start))) return start;
  if (k >= static_cast<double>(hi)) return hi;
  return static_cast<std::int64_t>(k);
}

void BarrierWalkSpec::validate() const {
  check_stochastic(p, "driving chain matrix");
  if (increments.size() != p.size()) {
    throw ValidationError("increment laws must form a kappa x kappa table");
  }
  for (const auto& r : increments) {
    if (r.size() != p.size()) {
      throw ValidationError("increment laws must form a kappa x kappa table");
    }
  }
  const QMatrix q = generator_of(p);
  if (auto pair = q.unreachable_pair()) {
    throw StructuralError("driving chain is reducible: type " +
                              std::to_string(pair->second) +
                              " is unreachable from type " +
                              std::to_string(pair->first),
                          pair->first, pair->second);
  }
}

BarrierWalkKernel::BarrierWalkKernel(BarrierWalkSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
}

double BarrierWalkKernel::admissible(std::int64_t s, int i) const {
  double a = 0.0;
  for (int j = 1; j <= kappa(); ++j) {
    const double pij = spec_.p[i - 1][j - 1];
    if (pij > 0.0) a += pij * spec_.increments[i - 1][j - 1].prob_between(0, s);
  }
  return a;
}

bool BarrierWalkKernel::is_absorbing(std::int64_t position) const {
  if (position <= 0) return true;
  for (int i = 1; i <= kappa(); ++i) {
    for (int j = 1; j <= kappa(); ++j) {
      if (spec_.p[i - 1][j - 1] > 0.0 &&
          spec_.increments[i - 1][j - 1].prob_between(1, position) > 0.0) {
        return false;
      }
    }
  }
  return true;
}

std::vector<RowEntry> BarrierWalkKernel::row(State s) const {
  if (is_absorbing(s.position)) return {{s.position, s.type, 1.0}};
  const int i = s.type;
  const double a = admissible(s.position, i);
  std::vector<RowEntry> out;
  for (int j = 1; j <= kappa(); ++j) {
    const double pij = spec_.p[i - 1][j - 1];
    if (pij <= 0.0) continue;
    if (a <= 0.0) {
      out.push_back({s.position, j, pij});
      continue;
    }
    const IncrementLaw& law = spec_.increments[i - 1][j - 1];
    std::int64_t top = s.position;
    if (law.kind() == IncrementLaw::Kind::kTable) {
      top = std::min<std::int64_t>(top, static_cast<std::int64_t>(law.probs().size()) - 1);
    }
    for (std::int64_t k = 0; k <= top; ++k) {
      const double q = law.pmf(k);
      if (q > 0.0) out.push_back({s.position - k, j, pij * q / a});
    }
  }
  return out;
}

std::int64_t BarrierWalkKernel::support_size(State s) const {
  if (is_absorbing(s.position)) return 1;
  return static_cast<std::int64_t>(kappa()) * (s.position + 1);
}

double BarrierWalkKernel::leave_probability(State s) const {
  if (is_absorbing(s.position)) return 0.0;
  const int i = s.type;
  const double a = admissible(s.position, i);
  double leave = 0.0;
  for (int j = 1; j <= kappa(); ++j) {
    const double pij = spec_.p[i - 1][j - 1];
    if (pij <= 0.0) continue;
    if (a <= 0.0) {
      if (j != i) leave += pij;
      continue;
    }
    const IncrementLaw& law = spec_.increments[i - 1][j - 1];
    leave += pij * law.prob_between(j == i ? 1 : 0, s.position);
  }
  return a <= 0.0 ? leave : leave / a;
}

State BarrierWalkKernel::sample_departure(State s, Stream& rng) const {
  const int i = s.type;
  const double a = admissible(s.position, i);
  std::vector<double> w(kappa(), 0.0);
  for (int j = 1; j <= kappa(); ++j) {
    const double pij = spec_.p[i - 1][j - 1];
    if (pij <= 0.0) continue;
    if (a <= 0.0) {
      w[j - 1] = j == i ? 0.0 : pij;
    } else {
      w[j - 1] = pij * spec_.increments[i - 1][j - 1].prob_between(
                           j == i ? 1 : 0, s.position);
    }
  }
  double total = 0.0;
  for (double v : w) total += v;
  if (!(total > 0.0)) {
    throw ValidationError("departure requested from a state that cannot move");
  }
  const int j = static_cast<int>(rng.categorical(w)) + 1;
  if (a <= 0.0) return {s.position, j};
  const std::int64_t k = spec_.increments[i - 1][j - 1].sample_between(
      j == i ? 1 : 0, s.position, rng);
  return {s.position - k, j};
}

std::vector<double> barrier_tail_constants(const BarrierWalkSpec& spec,
                                           double gamma) {
  spec.validate();
  std::vector<double> a(spec.kappa(), 0.0);
  for (int i = 0; i < spec.kappa(); ++i) {
    for (int j = 0; j < spec.kappa(); ++j) {
      if (spec.p[i][j] > 0.0) a[i] += spec.p[i][j] * spec.increments[i][j].tail_limit(gamma);
    }
  }
  return a;
}

LaplaceExponent barrier_limit(const BarrierWalkSpec& spec, const HeavyTailMode& mode) {
  spec.validate();
  if (!(mode.gamma > 0.0 && mode.gamma < 1.0)) {
    throw ValidationError("heavy-tail index gamma must lie in (0, 1)");
  }
  if (static_cast<int>(mode.a.size()) != spec.kappa()) {
    throw ValidationError("heavy-tail mode needs one tail constant per type");
  }
  for (double v : mode.a) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ValidationError("tail constants must be finite and >= 0");
    }
  }
  const std::vector<double> pi = stationary_distribution_stochastic(spec.p);
  double weight = 0.0;
  for (int i = 0; i < spec.kappa(); ++i) weight += pi[i] * mode.a[i];
  JumpMeasure jumps({JumpComponent{FiniteMeasure::lebesgue(), 0.0,
                                   -mode.gamma - 1.0, weight * mode.gamma}});
  return LaplaceExponent(0.0, 0.0, std::move(jumps));
}

FiniteMeanLimit barrier_limit(const BarrierWalkSpec& spec) {
  spec.validate();
  FiniteMeanLimit out;
  out.pi = stationary_distribution_stochastic(spec.p);
  out.m.assign(spec.kappa(), 0.0);
  for (int i = 0; i < spec.kappa(); ++i) {
    for (int j = 0; j < spec.kappa(); ++j) {
      if (spec.p[i][j] > 0.0) out.m[i] += spec.p[i][j] * spec.increments[i][j].mean();
    }
    if (!std::isfinite(out.m[i])) {
      throw ValidationError("type " + std::to_string(i + 1) +
                            " has infinite mean increments");
    }
  }
  for (int i = 0; i < spec.kappa(); ++i) {
    out.m_sum += out.m[i];
    out.m_weighted += out.pi[i] * out.m[i];
  }
  out.absorption_sum = 1.0 / out.m_sum;
  out.absorption_weighted = 1.0 / out.m_weighted;
  return out;
}

}  // namespace maplim
