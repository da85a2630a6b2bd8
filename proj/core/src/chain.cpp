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

#include "maplim/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "maplim/error.hpp"

namespace maplim {
namespace {

std::string describe(State s) {
  return "(" + std::to_string(s.position) + ", " + std::to_string(s.type) + ")";
}

void check_row(const std::vector<RowEntry>& row, State s, int kappa) {
  double sum = 0.0;
  for (const RowEntry& e : row) {
    if (!(e.p >= 0.0)) {
      throw ValidationError("negative probability in row " + describe(s));
    }
    if (e.position > s.position || e.position < 0) {
      throw ValidationError("row " + describe(s) + " moves to position " +
                            std::to_string(e.position));
    }
    if (e.type < 1 || e.type > kappa) {
      throw ValidationError("row " + describe(s) + " has invalid type " +
                            std::to_string(e.type));
    }
    sum += e.p;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw ValidationError("row " + describe(s) + " sums to " + std::to_string(sum));
  }
}

}  // namespace

std::int64_t TransitionKernel::support_size(State s) const {
  return static_cast<std::int64_t>(row(s).size());
}

double TransitionKernel::leave_probability(State s) const {
  double p = 0.0;
  for (const RowEntry& e : row(s)) {
    if (e.position != s.position || e.type != s.type) p += e.p;
  }
  return p;
}

State TransitionKernel::sample(State s, Stream& rng) const {
  const std::vector<RowEntry> r = row(s);
  check_row(r, s, kappa());
  double u = rng.uniform();
  for (const RowEntry& e : r) {
    if (u < e.p) return {e.position, e.type};
    u -= e.p;
  }
  for (auto it = r.rbegin(); it != r.rend(); ++it) {
    if (it->p > 0.0) return {it->position, it->type};
  }
  return s;
}

State TransitionKernel::sample_departure(State s, Stream& rng) const {
  std::vector<RowEntry> r = row(s);
  std::vector<double> w;
  w.reserve(r.size());
  double total = 0.0;
  for (const RowEntry& e : r) {
    const bool stay = e.position == s.position && e.type == s.type;
    w.push_back(stay ? 0.0 : e.p);
    total += w.back();
  }
  if (!(total > 0.0)) {
    throw ValidationError("departure requested from a state that cannot move " +
                          describe(s));
  }
  const RowEntry& e = r[rng.categorical(w)];
  return {e.position, e.type};
}

TableKernel::TableKernel(int kappa,
                         std::vector<std::vector<std::vector<RowEntry>>> rows,
                         std::vector<std::int64_t> absorbing)
    : kappa_(kappa), rows_(std::move(rows)), absorbing_(std::move(absorbing)) {
  if (kappa < 1) throw ValidationError("kernel needs at least one type");
  std::sort(absorbing_.begin(), absorbing_.end());
  for (std::size_t n = 0; n < rows_.size(); ++n) {
    if (rows_[n].size() != static_cast<std::size_t>(kappa)) {
      throw ValidationError("table kernel needs one row per type at position " +
                            std::to_string(n));
    }
  }
  std::vector<std::int64_t> all(rows_.size());
  for (std::size_t n = 0; n < rows_.size(); ++n) all[n] = static_cast<std::int64_t>(n);
  validate_kernel(*this, all);
}

TableKernel TableKernel::identity(int kappa, std::int64_t max_position) {
  std::vector<std::vector<std::vector<RowEntry>>> rows(max_position + 1);
  std::vector<std::int64_t> absorbing;
  for (std::int64_t n = 0; n <= max_position; ++n) {
    for (int i = 1; i <= kappa; ++i) rows[n].push_back({{n, i, 1.0}});
    absorbing.push_back(n);
  }
  return TableKernel(kappa, std::move(rows), std::move(absorbing));
}

std::vector<RowEntry> TableKernel::row(State s) const {
  if (s.position < 0 || s.position >= static_cast<std::int64_t>(rows_.size()) ||
      s.type < 1 || s.type > kappa_) {
    throw ValidationError("state " + describe(s) + " outside the kernel table");
  }
  return rows_[s.position][s.type - 1];
}

bool TableKernel::is_absorbing(std::int64_t position) const {
  return std::binary_search(absorbing_.begin(), absorbing_.end(), position);
}

void validate_kernel(const TransitionKernel& kernel,
                     const std::vector<std::int64_t>& positions) {
  for (std::int64_t n : positions) {
    for (int i = 1; i <= kernel.kappa(); ++i) {
      const State s{n, i};
      const std::vector<RowEntry> r = kernel.row(s);
      check_row(r, s, kernel.kappa());
      if (kernel.is_absorbing(n)) {
        double stay = 0.0;
        for (const RowEntry& e : r) {
          if (e.position == n && e.type == i) stay += e.p;
        }
        if (std::abs(stay - 1.0) > 1e-12) {
          throw ValidationError("declared absorbing state " + describe(s) +
                                " is left with positive probability");
        }
      }
    }
  }
}

void validate_kernel_sampled(const TransitionKernel& kernel,
                             std::int64_t max_position, int samples, Stream& rng) {
  std::vector<std::int64_t> positions;
  for (int k = 0; k < samples; ++k) {
    positions.push_back(static_cast<std::int64_t>(
        rng.uniform() * static_cast<double>(max_position + 1)));
  }
  validate_kernel(kernel, positions);
}

State step(const TransitionKernel& kernel, State s, Stream& rng) {
  return kernel.sample(s, rng);
}

std::int64_t ChainRunResult::type_change_time(int p) const {
  if (p < 1) throw ValidationError("type change index starts at 1");
  if (static_cast<std::size_t>(p) <= type_changes.size()) return type_changes[p - 1];
  return absorption_time;
}

ChainRunResult run_chain(const TransitionKernel& kernel, State start, Stream& rng,
                         const ChainOptions& opts) {
  if (start.position < 0 || start.type < 1 || start.type > kernel.kappa()) {
    throw ValidationError("invalid start state " + describe(start));
  }
  ChainRunResult out;
  State s = start;
  std::int64_t t = 0;
  std::int64_t last_move = 0;
  if (opts.record_path) out.path.push(0.0, static_cast<double>(s.position), s.type);
  while (!kernel.is_absorbing(s.position)) {
    const double leave = kernel.leave_probability(s);
    if (!(leave > 0.0)) break;
    const std::uint64_t stays = rng.geometric_failures(leave);
    const std::uint64_t room = static_cast<std::uint64_t>(opts.max_steps - t);
    if (stays >= room) {
      throw RunawayError("step budget of " + std::to_string(opts.max_steps) +
                             " exceeded at state " + describe(s),
                         s.position, s.type);
    }
    t += static_cast<std::int64_t>(stays) + 1;
    const State next = kernel.sample_departure(s, rng);
    if (next.type != s.type) out.type_changes.push_back(t);
    if (next.position != s.position) last_move = t;
    s = next;
    if (opts.record_path) {
      out.path.push(static_cast<double>(t), static_cast<double>(s.position), s.type);
    }
  }
  out.absorption_time = last_move;
  out.steps = t;
  out.final_state = s;
  return out;
}

SteppedPath rescale_path(const ChainRunResult& result, std::int64_t n, double gamma) {
  if (n < 1 || !(gamma > 0.0)) {
    throw ValidationError("rescale_path needs n >= 1 and gamma > 0");
  }
  const double tscale = std::pow(static_cast<double>(n), gamma);
  const double xscale = static_cast<double>(n);
  const SteppedPath& p = result.path;
  std::vector<double> times(p.size());
  std::vector<double> positions(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    times[k] = p.times()[k] / tscale;
    positions[k] = p.positions()[k] / xscale;
  }
  return SteppedPath(std::move(times), std::move(positions), p.types());
}

}  // namespace maplim
