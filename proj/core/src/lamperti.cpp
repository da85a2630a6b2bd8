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

#include "maplim/lamperti.hpp"

#include <algorithm>
#include <cmath>

#include "maplim/error.hpp"

namespace maplim {

TimeChange::TimeChange(double alpha, std::vector<double> g_times,
                       std::vector<double> f_times, std::vector<double> slopes,
                       double g_absorption, double f_absorption)
    : alpha_(alpha),
      g_times_(std::move(g_times)),
      f_times_(std::move(f_times)),
      slopes_(std::move(slopes)),
      g_absorption_(g_absorption),
      f_absorption_(f_absorption) {}

double TimeChange::operator()(double t) const {
  if (!(t >= 0.0)) throw ValidationError("time change evaluated at negative time");
  if (t >= g_absorption_) return f_absorption_;
  const auto it = std::upper_bound(g_times_.begin(), g_times_.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - g_times_.begin()) - 1;
  return f_times_[k] + (t - g_times_[k]) * slopes_[k];
}

double TimeChange::inverse(double u) const {
  if (!(u >= 0.0)) throw ValidationError("inverse clock evaluated at negative time");
  if (u >= f_absorption_) return g_absorption_;
  const auto it = std::upper_bound(f_times_.begin(), f_times_.end(), u);
  const std::size_t k = static_cast<std::size_t>(it - f_times_.begin()) - 1;
  return g_times_[k] + (u - f_times_[k]) / slopes_[k];
}

LampertiResult lamperti_time_change(const SteppedPath& f, double alpha) {
  if (f.empty()) throw ValidationError("lamperti_time_change: empty path");
  if (!(f.positions().front() > 0.0)) {
    throw ValidationError("lamperti_time_change: path must start positive");
  }
  if (!f.non_increasing()) {
    throw ValidationError("lamperti_time_change: path must be non-increasing");
  }
  const std::size_t segs = f.size();
  std::size_t first_zero = segs;
  for (std::size_t k = 0; k < segs; ++k) {
    if (f.positions()[k] == 0.0) {
      first_zero = k;
      break;
    }
  }
  // A non-increasing path cannot leave 0, so zeros only occur as a tail.

  std::vector<double> g_times;
  std::vector<double> f_times;
  std::vector<double> slopes;
  SteppedPath g;
  double clock = 0.0;
  for (std::size_t k = 0; k < first_zero; ++k) {
    const double v = f.positions()[k];
    g_times.push_back(clock);
    f_times.push_back(f.times()[k]);
    slopes.push_back(std::pow(v, -alpha));
    g.push(clock, v, f.types()[k]);
    if (k + 1 < segs) {
      const double len = f.times()[k + 1] - f.times()[k];
      clock += len * std::pow(v, alpha);
    } else {
      clock = std::numeric_limits<double>::infinity();
    }
  }
  double f_abs = std::numeric_limits<double>::infinity();
  double g_abs = std::numeric_limits<double>::infinity();
  if (first_zero < segs) {
    f_abs = f.times()[first_zero];
    g_abs = clock;
    g.push(clock, 0.0, 0);
  }
  TimeChange tau(alpha, std::move(g_times), std::move(f_times), std::move(slopes),
                 g_abs, f_abs);
  return {std::move(tau), std::move(g)};
}

LampertiResult discrete_lamperti(const ChainRunResult& result, std::int64_t n,
                                 double gamma) {
  return lamperti_time_change(rescale_path(result, n, gamma), -gamma);
}

SteppedPath glue(const SteppedPath& f, const SteppedPath& g, double t) {
  if (!(t >= 0.0)) throw ValidationError("glue needs t >= 0");
  SteppedPath out;
  for (std::size_t k = 0; k < f.size() && f.times()[k] < t; ++k) {
    out.push(f.times()[k], f.positions()[k], f.types()[k]);
  }
  for (std::size_t k = 0; k < g.size(); ++k) {
    out.push(t + g.times()[k], g.positions()[k], g.types()[k]);
  }
  return out;
}

SteppedPath shifted(const SteppedPath& path, double t) {
  if (!(t >= 0.0)) throw ValidationError("shift needs t >= 0");
  SteppedPath out;
  const std::size_t start = path.segment(t);
  out.push(0.0, path.positions()[start], path.types()[start]);
  for (std::size_t k = start + 1; k < path.size(); ++k) {
    out.push(path.times()[k] - t, path.positions()[k], path.types()[k]);
  }
  return out;
}

}  // namespace maplim
