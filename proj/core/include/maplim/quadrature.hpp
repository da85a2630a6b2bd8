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

#include <functional>

namespace maplim {

/// Target tolerances. QuadratureError is raised when the error estimate
/// exceeds 100 times both of them.
struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_levels = 15;
};

/// Integrand on [0, 1] receiving both x and w = 1 - x, each accurate to full
/// relative precision near its own endpoint.
using UnitIntegrand = std::function<double(double x, double w)>;

/// Integral of f over [0, 1] by tanh-sinh quadrature.
/// Throws QuadratureError when the error estimate exceeds the tolerances.
double integrate_unit(const UnitIntegrand& f, const QuadratureOptions& opts = {});

/// Integral of f over [a, b] with 0 <= a < b <= 1, same (x, w) convention.
double integrate_unit_range(const UnitIntegrand& f, double a, double b,
                            const QuadratureOptions& opts = {});

/// Integral over (0, 1) of an f behaving like x^p near 0 and w^q near 1,
/// with p, q > -1.
double integrate_unit_singular(const UnitIntegrand& f, double p, double q,
                               const QuadratureOptions& opts = {});

/// Integral of a smooth f over [a, b] by adaptive Gauss-Kronrod.
double integrate_smooth(const std::function<double(double)>& f, double a,
                        double b, const QuadratureOptions& opts = {});

/// Integral of f over [a, b] (0 < a < b) using the substitution x = e^s,
/// suited to integrands spread over many decades.
double integrate_log_scale(const std::function<double(double)>& f, double a,
                           double b, const QuadratureOptions& opts = {});

/// 1 - x^q for x in [0, 1], given w = 1 - x, without cancellation.
double one_minus_pow(double x, double w, double q);

}  // namespace maplim
