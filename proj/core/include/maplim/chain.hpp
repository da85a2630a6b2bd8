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
#include <memory>
#include <vector>

#include "maplim/path.hpp"
#include "maplim/rng.hpp"

namespace maplim {

/// State (n, i) of the bivariate chain; types are 1-based.
struct State {
  std::int64_t position = 0;
  int type = 1;

  friend bool operator==(const State&, const State&) = default;
};

struct RowEntry {
  std::int64_t position;
  int type;
  double p;
};

/// One-step law of a non-increasing bivariate chain.
///
/// Implementations must expose exact row evaluation; the sampling methods
/// have generic defaults built on `row` that concrete kernels override with
/// faster procedures.
class TransitionKernel {
 public:
  virtual ~TransitionKernel() = default;

  virtual int kappa() const = 0;
  virtual std::vector<RowEntry> row(State s) const = 0;
  virtual bool is_absorbing(std::int64_t position) const = 0;

  /// Number of entries `row(s)` would produce.
  virtual std::int64_t support_size(State s) const;
  /// Probability of leaving s in one step, computed without cancellation.
  virtual double leave_probability(State s) const;
  virtual State sample(State s, Stream& rng) const;
  /// One step conditioned on leaving s.
  virtual State sample_departure(State s, Stream& rng) const;
};

/// Kernel given by explicit rows for positions 0..N.
class TableKernel final : public TransitionKernel {
 public:
  /// rows[n][i - 1] is the row of state (n, i).
  TableKernel(int kappa, std::vector<std::vector<std::vector<RowEntry>>> rows,
              std::vector<std::int64_t> absorbing = {0});

  /// p_{n,i}(n,i) = 1 everywhere; every position is absorbing.
  static TableKernel identity(int kappa, std::int64_t max_position);

  int kappa() const override { return kappa_; }
  std::vector<RowEntry> row(State s) const override;
  bool is_absorbing(std::int64_t position) const override;

 private:
  int kappa_;
  std::vector<std::vector<std::vector<RowEntry>>> rows_;
  std::vector<std::int64_t> absorbing_;
};

/// Checks normalization, monotonicity and the absorbing declaration on the
/// given positions (all types). Throws ValidationError on the first failure.
void validate_kernel(const TransitionKernel& kernel,
                     const std::vector<std::int64_t>& positions);

/// Spot-checks `samples` uniformly drawn positions in [0, max_position].
void validate_kernel_sampled(const TransitionKernel& kernel,
                             std::int64_t max_position, int samples, Stream& rng);

/// One step of the chain.
State step(const TransitionKernel& kernel, State s, Stream& rng);

struct ChainOptions {
  std::int64_t max_steps = 1'000'000'000;
  bool record_path = true;
};

struct ChainRunResult {
  /// Step function over step counts; only changes are stored.
  SteppedPath path;
  /// Absorption time A: index of the last position change.
  std::int64_t absorption_time = 0;
  /// Steps at which the type changed, increasing.
  std::vector<std::int64_t> type_changes;
  std::int64_t steps = 0;
  State final_state;

  /// T(p) for p >= 1; equals A once type changes are exhausted.
  std::int64_t type_change_time(int p) const;
};

/// Runs the chain from `start` until it enters a declared absorbing position
/// (or a state it cannot leave). Holding times are drawn as geometric
/// variables, so long runs of stays cost O(1).
/// Throws RunawayError when the step budget is exceeded.
ChainRunResult run_chain(const TransitionKernel& kernel, State start, Stream& rng,
                         const ChainOptions& opts = {});

/// Time divided by n^gamma, position divided by n.
SteppedPath rescale_path(const ChainRunResult& result, std::int64_t n,
                         double gamma);

}  // namespace maplim
