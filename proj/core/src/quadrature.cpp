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

#include "maplim/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "maplim/error.hpp"

namespace maplim {
namespace {

void check_error(double value, double error, double l1,
                 const QuadratureOptions& opts, const char* where) {
  if (!std::isfinite(value)) {
    throw QuadratureError(std::string(where) + ": non-finite integral",
                          std::numeric_limits<double>::infinity());
  }
  // The tolerances are targets; only estimates well above them are failures.
  constexpr double kSlack = 100.0;
  if (error > kSlack * opts.abs_tol && error > kSlack * opts.rel_tol * l1) {
    char buf[128];
    std::snprintf(buf, sizeof buf, ": error estimate %.3g exceeds tolerance (|f| mass %.3g)",
                  error, l1);
    throw QuadratureError(std::string(where) + buf, error);
  }
}

}  // namespace

double one_minus_pow(double x, double w, double q) {
  if (q == 0.0) return 0.0;
  if (x <= 0.0) return 1.0;
  if (w < 1e-8) return q * w;
  const double lx = x < 0.5 ? std::log(x) : std::log1p(-w);
  return -std::expm1(q * lx);
}

double integrate_unit_range(const UnitIntegrand& f, double a, double b,
                            const QuadratureOptions& opts) {
  if (!(b > a)) return 0.0;
  boost::math::quadrature::tanh_sinh<double> ts(opts.max_levels);
  // Boost passes xc = a - x on the left half and xc = b - x on the right.
  auto g = [&](double x, double xc) -> double {
    double w;
    if (xc < 0.0) {
      w = 1.0 - x;
    } else if (b == 1.0) {
      w = xc;
    } else {
      w = 1.0 - x;
    }
    if (x <= 0.0 || w <= 0.0) return 0.0;
    return f(x, w);
  };
  double error = 0.0;
  double l1 = 0.0;
  const double value = ts.integrate(g, a, b, opts.rel_tol, &error, &l1);
  check_error(value, error, l1, opts, "tanh-sinh");
  return value;
}

double integrate_unit(const UnitIntegrand& f, const QuadratureOptions& opts) {
  return integrate_unit_range(f, 0.0, 1.0, opts);
}

// Substituting s = x^{p+1} (resp. w^{q+1}) removes the endpoint powers,
// which tanh-sinh would otherwise truncate when they are close to -1.
double integrate_unit_singular(const UnitIntegrand& f, double p, double q,
                               const QuadratureOptions& opts) {
  if (p >= 0.0 && q >= 0.0) return integrate_unit(f, opts);
  constexpr double kTiny = std::numeric_limits<double>::min();
  double sum = 0.0;
  if (p < 0.0) {
    const double e = p + 1.0;
    sum += integrate_unit_range(
        [&](double s, double) {
          // Near the endpoint f(x) x^{-p} is flat, so underflow is clamped.
          const double x = std::max(std::exp(std::log(s) / e), kTiny);
          return f(x, 1.0 - x) * std::pow(x, -p) / e;
        },
        0.0, std::pow(0.5, e), opts);
  } else {
    sum += integrate_unit_range(f, 0.0, 0.5, opts);
  }
  if (q < 0.0) {
    const double e = q + 1.0;
    sum += integrate_unit_range(
        [&](double v, double) {
          const double w = std::max(std::exp(std::log(v) / e), kTiny);
          return f(1.0 - w, w) * std::pow(w, -q) / e;
        },
        0.0, std::pow(0.5, e), opts);
  } else {
    sum += integrate_unit_range(f, 0.5, 1.0, opts);
  }
  return sum;
}

double integrate_smooth(const std::function<double(double)>& f, double a,
                        double b, const QuadratureOptions& opts) {
  if (!(b > a)) return 0.0;
  // Boost's error estimate degrades on short intervals, so map onto [0, 1].
  const double h = b - a;
  auto g = [&](double t) { return h * f(a + h * t); };
  double error = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      g, 0.0, 1.0, static_cast<unsigned>(opts.max_levels), opts.rel_tol, &error,
      &l1);
  check_error(value, error, l1, opts, "gauss-kronrod");
  return value;
}

double integrate_log_scale(const std::function<double(double)>& f, double a,
                           double b, const QuadratureOptions& opts) {
  if (!(b > a)) return 0.0;
  auto g = [&](double s) {
    const double x = std::exp(s);
    return f(x) * x;
  };
  return integrate_smooth(g, std::log(a), std::log(b), opts);
}

}  // namespace maplim
