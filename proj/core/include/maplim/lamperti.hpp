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
#include <limits>
#include <vector>

#include "maplim/chain.hpp"
#include "maplim/path.hpp"

namespace maplim {

/// The time change tau(t) = inf{u : int_0^u f(r)^alpha dr > t} of a step
/// path f, stored segment by segment.
class TimeChange {
 public:
  TimeChange() = default;
  TimeChange(double alpha, std::vector<double> g_times, std::vector<double> f_times,
             std::vector<double> slopes, double g_absorption, double f_absorption);

  /// tau(t); constant equal to T_0(f) for t >= T_0(g).
  double operator()(double t) const;
  /// The inverse clock rho(u) = int_0^u f(r)^alpha dr for u <= T_0(f).
  double inverse(double u) const;

  double alpha() const noexcept { return alpha_; }
  /// T_0(g), +inf if f never reaches 0.
  double absorption_time() const noexcept { return g_absorption_; }
  /// T_0(f).
  double source_absorption_time() const noexcept { return f_absorption_; }
  const std::vector<double>& slopes() const noexcept { return slopes_; }

 private:
  double alpha_ = 0.0;
  std::vector<double> g_times_;
  std::vector<double> f_times_;
  std::vector<double> slopes_;
  double g_absorption_ = std::numeric_limits<double>::infinity();
  double f_absorption_ = std::numeric_limits<double>::infinity();
};

struct LampertiResult {
  TimeChange tau;
  SteppedPath g;
};

/// g(t) = f(tau(t)) for a non-increasing step path f with f(0) > 0.
/// After absorption g is 0 with type 0.
LampertiResult lamperti_time_change(const SteppedPath& f, double alpha);

/// Lamperti time change with alpha = -gamma of the rescaled chain path.
LampertiResult discrete_lamperti(const ChainRunResult& result, std::int64_t n,
                                 double gamma);

/// glue^{[t]}(f, g)(s) = f(s) for s < t and g(s - t) for s >= t.
SteppedPath glue(const SteppedPath& f, const SteppedPath& g, double t);

/// s -> path(s + t).
SteppedPath shifted(const SteppedPath& path, double t);

}  // namespace maplim
