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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "maplim/diagnostics.hpp"
#include "maplim/models.hpp"
#include "maplim/serialize.hpp"

namespace maplim {

/// A built-in experiment: a kernel, its limit and the gates to check.
struct FixtureInfo {
  std::string name;
  std::string regime;
  std::string description;
  /// Fixture spec accepted by ExperimentConfig under "spec".
  Json spec;
};

/// The six built-in fixtures, in a fixed order.
const std::vector<FixtureInfo>& list_fixtures();
const FixtureInfo& find_fixture(const std::string& name);

/// Resolved experiment configuration.
///
/// JSON keys: "fixture" (name) or "spec" (inline fixture spec), "seed"
/// (required), "n_grid", "replicates", "limit_replicates", "gamma" and "beta"
/// (overrides), "tolerances" (gate overrides) and "jobs".
struct ExperimentConfig {
  std::string fixture;
  Json spec;
  std::vector<std::int64_t> n_grid;
  std::int64_t replicates = 0;
  std::int64_t limit_replicates = 0;
  std::uint64_t seed = 0;
  int jobs = 0;

  /// Throws ValidationError on schema violations.
  static ExperimentConfig from_json(const Json& j);
  /// Canonical form; excludes settings that do not affect results.
  Json to_json() const;
  /// FNV-1a 64 of the canonical dump, as 16 hex digits.
  std::string hash() const;
};

/// FNV-1a 64-bit hash.
std::uint64_t fnv1a64(const std::string& bytes) noexcept;

struct BuiltExperiment {
  ChainExperiment chain;
  Json gates;
  std::optional<CoalescentEnvSpec> coalescent;
  std::optional<BarrierWalkSpec> barrier;
};

/// Builds kernel, limit and gates. Throws ValidationError or
/// HypothesisViolation when the model cannot be run.
BuiltExperiment build_experiment(const ExperimentConfig& config);

/// Runs the experiment and appends model-specific rows (tail constant,
/// hypothesis functionals, barrier constants).
ConvergenceReport run_experiment(const ExperimentConfig& config);

/// Writes report.json and report.csv (and paths/*.csv when `dump_paths`)
/// under `out_dir`. Every file embeds the config hash.
void write_outputs(const ConvergenceReport& report, const ExperimentConfig& config,
                   const std::string& out_dir, bool dump_paths);

/// psi tables: `spec` holds "psi" (a Laplace exponent), "measure" (mu on
/// [0, 1]), "characteristics" or "fixture" (the limit of a built-in).
/// Writes CSV `q,psi_1,...,psi_kappa`.
void write_psi_table(const Json& spec, const std::vector<double>& qs, std::ostream& out);

}  // namespace maplim
