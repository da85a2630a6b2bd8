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

#include "maplim/rng.hpp"

#include <cmath>

namespace maplim {

double Stream::exponential(double rate) noexcept {
  return -std::log(uniform()) / rate;
}

double Stream::normal() noexcept {
  // Marsaglia polar method; the second variate is discarded so that the
  // stream position does not depend on hidden state.
  for (;;) {
    const double u = 2.0 * uniform() - 1.0;
    const double v = 2.0 * uniform() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

double Stream::log_gamma_variate(double shape) noexcept {
  if (shape < 1.0) {
    // G(a) = G(a + 1) * U^(1/a)
    return log_gamma_variate(shape + 1.0) + std::log(uniform()) / shape;
  }
  // Marsaglia & Tsang (2000).
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return std::log(d * v);
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return std::log(d * v);
  }
}

std::pair<double, double> Stream::beta(double a, double b) noexcept {
  const double lx = log_gamma_variate(a);
  const double ly = log_gamma_variate(b);
  // x = X / (X + Y) = 1 / (1 + exp(ly - lx))
  const double x = 1.0 / (1.0 + std::exp(ly - lx));
  const double xc = 1.0 / (1.0 + std::exp(lx - ly));
  return {x, xc};
}

std::uint64_t Stream::geometric_failures(double success) noexcept {
  if (success >= 1.0) return 0;
  const double g = std::floor(std::log(uniform()) / std::log1p(-success));
  if (!(g < 1.8e19)) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(g);
}

std::size_t Stream::categorical(std::span<const double> weights) noexcept {
  double total = 0.0;
  for (double w : weights) total += w;
  double target = uniform() * total;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    last_positive = k;
    if (target < weights[k]) return k;
    target -= weights[k];
  }
  return last_positive;
}

}  // namespace maplim
