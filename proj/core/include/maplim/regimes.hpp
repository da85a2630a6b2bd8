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
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "maplim/chain.hpp"
#include "maplim/map.hpp"
#include "maplim/measures.hpp"

namespace maplim {

/// Type changes at the same scale as macroscopic jumps.
struct CriticalSpec {
  double gamma = 1.0;
  /// mu[i][j] on (0, 1] for 0-based types.
  std::vector<std::vector<FiniteMeasure>> mu;

  int kappa() const noexcept { return static_cast<int>(mu.size()); }
  void validate() const;
};

/// Type changes much faster than macroscopic jumps.
struct MixingSpec {
  double gamma = 1.0;
  double beta = 0.0;
  std::vector<FiniteMeasure> mu;
  QMatrix q;

  void validate() const;
};

/// Type changes much slower than macroscopic jumps.
struct SoloSpec {
  double gamma = 1.0;
  int type = 1;
  FiniteMeasure mu;

  void validate() const;
};

using RegimeSpec = std::variant<CriticalSpec, MixingSpec, SoloSpec>;

MapCharacteristics limit_map_critical(const CriticalSpec& spec);
LaplaceExponent limit_subordinator_mixing(const MixingSpec& spec);
LaplaceExponent limit_subordinator_solo(const SoloSpec& spec);

enum class Regime { kCritical, kMixing, kSolo };

Regime classify_regime(double beta, double gamma);
std::string to_string(Regime regime);

using TestFunction = std::function<double(double)>;

/// Sentinel for the `j` argument of hypothesis_functional: sum over types.
inline constexpr int kAllTypes = 0;

/// n^gamma sum_m f(m/n) (1 - (m/n) [j = i]) p_{n,i}(m, j), or with j = ALL
/// n^gamma sum_m f(m/n) (1 - m/n) p_n^{(i)}(m).
/// Throws BudgetError when the row has more than `budget` entries.
double hypothesis_functional(const TransitionKernel& kernel, std::int64_t n, int i,
                             int j, const TestFunction& f, double gamma,
                             std::int64_t budget = 100'000'000);

struct MomentGen {
  /// G_n(lambda) = E[(X(1)/n)^lambda] from (n, i).
  double g = 1.0;
  /// n^gamma (1 - G_n(lambda)), comparable with psi_i(lambda).
  double diagnostic = 0.0;
};

MomentGen kernel_moment_gen(const TransitionKernel& kernel, std::int64_t n, int i,
                            double lambda, double gamma,
                            std::int64_t budget = 100'000'000);

struct NamedFunction {
  std::string name;
  TestFunction f;
};

/// {1, x, x^2, x^(1/2), x^5}: the powers x^lambda for lambda in {1/2, 1, 2, 5}
/// together with the constant.
std::vector<NamedFunction> hypothesis_basis();

struct HypothesisRow {
  std::int64_t n;
  std::string function;
  double value;
  double value_2n;
  double target;
  /// |value - value_2n| < 5% of |value_2n|; reporting label only.
  bool converged;
};

/// Evaluates the basis at each n (and 2n) against targets int f dmu.
std::vector<HypothesisRow> hypothesis_table(const TransitionKernel& kernel,
                                            const std::vector<std::int64_t>& n_grid,
                                            int i, int j, double gamma,
                                            const FiniteMeasure& target);

}  // namespace maplim
