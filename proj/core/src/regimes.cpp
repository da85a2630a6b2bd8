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

#include "maplim/regimes.hpp"

#include <cmath>

#include "maplim/error.hpp"

namespace maplim {
namespace {

void check_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ValidationError("gamma must be positive and finite");
  }
}

}  // namespace

void CriticalSpec::validate() const {
  check_gamma(gamma);
  const int k = kappa();
  if (k < 1) throw ValidationError("critical spec needs at least one type");
  std::vector<bool> jumps(k, false);
  for (int i = 0; i < k; ++i) {
    if (static_cast<int>(mu[i].size()) != k) {
      throw ValidationError("critical spec needs a kappa x kappa table of measures");
    }
    for (int j = 0; j < k; ++j) {
      if (mu[i][j].atom_mass(0.0) > 0.0) {
        throw ValidationError("critical spec measures must not charge 0");
      }
      if (mu[i][j].open_mass() > 0.0) jumps[i] = true;
    }
  }
  for (int i = 0; i < k; ++i) {
    std::vector<bool> seen(k, false);
    std::vector<int> stack{i};
    seen[i] = true;
    bool found = false;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      if (jumps[u]) {
        found = true;
        break;
      }
      for (int v = 0; v < k; ++v) {
        if (v != u && mu[u][v].total_mass() > 0.0 && !seen[v]) {
          seen[v] = true;
          stack.push_back(v);
        }
      }
    }
    if (!found) {
      throw ValidationError("critical spec: type " + std::to_string(i + 1) +
                            " cannot reach a type with jumps in (0, 1)");
    }
  }
}

void MixingSpec::validate() const {
  check_gamma(gamma);
  if (!(beta >= 0.0) || !(beta < gamma)) {
    throw ValidationError("mixing spec needs 0 <= beta < gamma");
  }
  if (static_cast<int>(mu.size()) != q.kappa()) {
    throw ValidationError("mixing spec needs one measure per type");
  }
  bool nontrivial = false;
  for (const FiniteMeasure& m : mu) nontrivial = nontrivial || !m.empty();
  if (!nontrivial) throw ValidationError("mixing spec needs a nontrivial measure");
  if (const auto pair = q.unreachable_pair()) {
    throw StructuralError("mixing spec Q-matrix is reducible", pair->first,
                          pair->second);
  }
}

void SoloSpec::validate() const {
  check_gamma(gamma);
  if (type < 1) throw ValidationError("solo spec type must be >= 1");
  if (mu.empty()) throw ValidationError("solo spec measure must be nontrivial");
}

MapCharacteristics limit_map_critical(const CriticalSpec& spec) {
  spec.validate();
  const int k = spec.kappa();
  MapCharacteristics c;
  c.kappa = k;
  c.lambda.assign(k, std::vector<double>(k, 0.0));
  c.switch_jumps.assign(k, std::vector<SwitchLaw>(k));
  for (int i = 0; i < k; ++i) {
    const FiniteMeasure& diag = spec.mu[i][i];
    Pushforward pf = pushforward_neglog(diag.restricted_open(), true);
    c.psi.emplace_back(0.0, diag.atom_mass(1.0), std::move(pf.measure));
    for (int j = 0; j < k; ++j) {
      if (j == i) continue;
      const double mass = spec.mu[i][j].total_mass();
      c.lambda[i][j] = mass;
      if (mass > 0.0) c.switch_jumps[i][j] = SwitchLaw(spec.mu[i][j]);
    }
  }
  return c;
}

LaplaceExponent limit_subordinator_mixing(const MixingSpec& spec) {
  spec.validate();
  const std::vector<double> pi = stationary_distribution(spec.q);
  std::vector<LaplaceExponent> parts;
  for (const FiniteMeasure& m : spec.mu) parts.push_back(laplace_exponent_from_measure(m));
  return LaplaceExponent::mixture(pi, parts);
}

LaplaceExponent limit_subordinator_solo(const SoloSpec& spec) {
  spec.validate();
  return laplace_exponent_from_measure(spec.mu);
}

Regime classify_regime(double beta, double gamma) {
  if (!(beta >= 0.0) || !(gamma > 0.0)) {
    throw ValidationError("classify_regime needs beta >= 0 and gamma > 0");
  }
  if (beta == gamma) return Regime::kCritical;
  return beta < gamma ? Regime::kMixing : Regime::kSolo;
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::kCritical:
      return "critical";
    case Regime::kMixing:
      return "mixing";
    case Regime::kSolo:
      return "solo";
  }
  return "unknown";
}

double hypothesis_functional(const TransitionKernel& kernel, std::int64_t n, int i,
                             int j, const TestFunction& f, double gamma,
                             std::int64_t budget) {
  if (n < 1) throw ValidationError("hypothesis functional needs n >= 1");
  const State s{n, i};
  if (kernel.support_size(s) > budget) {
    throw BudgetError("row at n = " + std::to_string(n) +
                      " exceeds the enumeration budget; use sampled estimation");
  }
  const double dn = static_cast<double>(n);
  double sum = 0.0;
  for (const RowEntry& e : kernel.row(s)) {
    if (j != kAllTypes && e.type != j) continue;
    const double x = static_cast<double>(e.position) / dn;
    // 1 - x computed from integers to stay exact at m = n.
    const double one_minus = static_cast<double>(n - e.position) / dn;
    const double weight = (j == kAllTypes || j == i) ? one_minus : 1.0;
    if (weight == 0.0 || e.p == 0.0) continue;
    sum += f(x) * weight * e.p;
  }
  return std::pow(dn, gamma) * sum;
}

MomentGen kernel_moment_gen(const TransitionKernel& kernel, std::int64_t n, int i,
                            double lambda, double gamma, std::int64_t budget) {
  if (n < 1) throw ValidationError("kernel_moment_gen needs n >= 1");
  const State s{n, i};
  if (kernel.support_size(s) > budget) {
    throw BudgetError("row at n = " + std::to_string(n) +
                      " exceeds the enumeration budget; use sampled estimation");
  }
  const double dn = static_cast<double>(n);
  double g = 0.0;
  double one_minus_g = 0.0;
  for (const RowEntry& e : kernel.row(s)) {
    if (e.p == 0.0) continue;
    const double x = static_cast<double>(e.position) / dn;
    const double w = static_cast<double>(n - e.position) / dn;
    g += e.p * std::pow(x, lambda);
    one_minus_g += e.p * one_minus_pow(x, w, lambda);
  }
  return {g, std::pow(dn, gamma) * one_minus_g};
}

std::vector<NamedFunction> hypothesis_basis() {
  return {
      {"1", [](double) { return 1.0; }},
      {"x", [](double x) { return x; }},
      {"x^2", [](double x) { return x * x; }},
      {"x^0.5", [](double x) { return std::sqrt(x); }},
      {"x^5", [](double x) { return std::pow(x, 5.0); }},
  };
}

std::vector<HypothesisRow> hypothesis_table(const TransitionKernel& kernel,
                                            const std::vector<std::int64_t>& n_grid,
                                            int i, int j, double gamma,
                                            const FiniteMeasure& target) {
  std::vector<HypothesisRow> rows;
  for (const NamedFunction& nf : hypothesis_basis()) {
    const double t = target.integrate([&](double x, double) { return nf.f(x); });
    for (std::int64_t n : n_grid) {
      const double v = hypothesis_functional(kernel, n, i, j, nf.f, gamma);
      const double v2 = hypothesis_functional(kernel, 2 * n, i, j, nf.f, gamma);
      const bool conv = std::abs(v - v2) < 0.05 * std::abs(v2);
      rows.push_back({n, nf.name, v, v2, t, conv});
    }
  }
  return rows;
}

}  // namespace maplim
