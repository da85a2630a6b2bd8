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
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "maplim/chain.hpp"
#include "maplim/map.hpp"
#include "maplim/path.hpp"
#include "maplim/rng.hpp"

namespace maplim {

/// Where the values of a sample came from: Stream(seed, first + r, substream)
/// for r = 0..count-1.
struct SeedProvenance {
  std::uint64_t seed = 0;
  std::uint32_t substream = 0;
  std::uint64_t first_replicate = 0;
  std::uint64_t count = 0;
};

class EmpiricalSample {
 public:
  EmpiricalSample() = default;
  /// Sorts `values`. A provenance record, if given, must count them all.
  explicit EmpiricalSample(std::vector<double> values,
                           std::optional<SeedProvenance> provenance = std::nullopt);

  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  const std::optional<SeedProvenance>& provenance() const noexcept {
    return provenance_;
  }
  /// Right-continuous empirical CDF.
  double cdf(double x) const;

 private:
  std::vector<double> values_;
  std::optional<SeedProvenance> provenance_;
};

using Cdf = std::function<double(double)>;

/// sup |F_a - F_b| over the two right-continuous empirical CDFs.
double ks_distance(const EmpiricalSample& a, const EmpiricalSample& b);
/// sup |F_n - F| against a continuous reference CDF.
double ks_distance(const EmpiricalSample& sample, const Cdf& reference);

/// Two-sample KS critical value at level 0.001 for sizes n and m.
double ks_critical_value(std::size_t n, std::size_t m);

struct MomentEstimate {
  double value = 0.0;
  /// Jackknife standard error; NaN for a single observation.
  double std_error = 0.0;
};

/// Mean of |x|^a with a jackknife standard error.
MomentEstimate moment_estimate(const EmpiricalSample& sample, double a);

/// Fraction of [0, T_eps] spent in each type, with
/// T_eps = inf{t : position(t) <= eps}. Types are 1..kappa.
/// Throws DegenerateError when T_eps = 0.
std::vector<double> occupation_measure(const SteppedPath& path, double eps, int kappa);

/// KS distance between X_t started from x and x X'_{x^{-g} t} started from 1,
/// where g = `scaling_gamma` (defaults to gamma).
double self_similarity_check(const MapCharacteristics& chars, double gamma, double x,
                             double t, std::int64_t replicates, Stream& rng,
                             std::optional<double> scaling_gamma = std::nullopt,
                             int start_type = 1);

// ---------------------------------------------------------------------------
// Convergence reports

enum class GateTier { kStatistical, kStructural, kInfo };
enum class GateOutcome { kPass, kFail, kSkipped, kInfo };

std::string to_string(GateTier tier);
std::string to_string(GateOutcome outcome);

struct ReportRow {
  std::int64_t n = 0;
  std::string statistic;
  double value = 0.0;
  double std_error = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  GateTier tier = GateTier::kInfo;
  GateOutcome outcome = GateOutcome::kInfo;
};

struct ConvergenceReport {
  std::string fixture;
  std::string regime;
  std::vector<std::int64_t> n_grid;
  std::uint64_t seed = 0;
  std::int64_t replicates = 0;
  std::int64_t limit_replicates = 0;
  std::string config_hash;
  std::vector<ReportRow> rows;
  std::vector<std::string> warnings;
  std::vector<std::string> notes;

  /// Throws ValidationError unless the grid is strictly increasing.
  void validate() const;
  bool structural_pass() const;
  bool statistical_pass() const;
  nlohmann::json to_json() const;
  /// Flat CSV: fixture,n,statistic,value,target,tolerance,pass.
  void write_csv(std::ostream& out) const;
};

/// Replicated chain runs at each n compared with a limit MAP.
struct ChainExperiment {
  std::string fixture;
  std::string regime;
  std::shared_ptr<const TransitionKernel> kernel;
  int start_type = 1;
  double gamma = 1.0;
  std::vector<std::int64_t> n_grid;
  std::int64_t replicates = 1000;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::int64_t max_steps = 1'000'000'000;

  /// Limit process; absorption and marginal laws are compared against it.
  std::shared_ptr<const MapSimulator> limit;
  int limit_start_type = 1;
  /// 0 means `replicates`.
  std::int64_t limit_replicates = 0;
  double limit_tolerance = 1e-10;
  std::vector<double> marginal_times = {0.1, 0.25, 0.5, 1.0, 2.0};
  /// Compare the law of A_n / n^gamma with the limit (off for degenerate
  /// limits, where only the mean is meaningful).
  bool absorption_law = true;

  /// E[A_n / n^gamma] target; defaults to the limit moment.
  std::optional<double> absorption_target;
  /// Structural bound on |mean - target| (relative when `mean_relative`).
  std::optional<double> mean_tolerance;
  bool mean_relative = false;
  /// Structural bound on the KS distance of A_n / n^gamma to the limit.
  std::optional<double> absorption_ks_tolerance;
  /// Structural bound on the standard deviation of A_n / n^gamma.
  std::optional<double> sd_bound;

  std::optional<std::vector<double>> occupation_target;
  double occupation_eps = 0.05;
  double occupation_tolerance = 0.03;

  /// First type change T_n(1) / n^gamma against the limit.
  bool first_switch = false;
  double first_switch_tolerance = 0.03;
  double switch_type_tolerance = 0.02;

  /// Stream substream for the chain at grid index k is k; the limit uses
  /// `kLimitSubstream`.
  static constexpr std::uint32_t kLimitSubstream = 0xFFFF;

  /// Throws ValidationError or HypothesisViolation for unusable setups.
  void validate() const;
};

/// Per-replicate chain summary used by the report.
struct ReplicateRecord {
  double absorption = 0.0;
  double first_switch = 0.0;
  int switch_type = 0;
  std::int64_t steps = 0;
  std::vector<double> occupation;
  std::vector<double> marginals;
};

ReplicateRecord simulate_replicate(const ChainExperiment& exp, std::int64_t n,
                                   Stream& rng);
ReplicateRecord simulate_limit_replicate(const ChainExperiment& exp, Stream& rng);

ConvergenceReport convergence_report(const ChainExperiment& exp);

}  // namespace maplim
