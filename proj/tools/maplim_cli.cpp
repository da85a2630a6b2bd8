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

// maplim: batch runner for the built-in scaling-limit experiments.
//
// Exit status: 0 on success, 1 when a structural gate fails, 2 on schema or
// usage errors, 3 when a simulation fails.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "maplim/error.hpp"
#include "maplim/experiment.hpp"

namespace {

constexpr int kExitGate = 1;
constexpr int kExitSchema = 2;
constexpr int kExitSimulation = 3;

struct Selection {
  std::string config_path;
  std::string fixture;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
};

void add_selection(CLI::App* cmd, Selection& s) {
  cmd->add_option("--config", s.config_path, "Experiment config (JSON)");
  cmd->add_option("--fixture", s.fixture, "Built-in fixture name (overrides the config)");
  cmd->add_option("--seed", s.seed, "Seed (overrides the config)");
  cmd->add_option("--jobs", s.jobs, "Worker threads (default: all cores)");
}

maplim::ExperimentConfig load_config(const Selection& s) {
  maplim::Json j = maplim::Json::object();
  if (!s.config_path.empty()) {
    std::ifstream in(s.config_path);
    if (!in) throw maplim::ValidationError("cannot open config " + s.config_path);
    try {
      j = maplim::Json::parse(in);
    } catch (const maplim::Json::exception& e) {
      throw maplim::ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
  } else if (s.fixture.empty()) {
    throw maplim::ValidationError("either --config or --fixture is required");
  }
  if (!j.is_object()) throw maplim::ValidationError("config must be a JSON object");
  if (!s.fixture.empty()) {
    j.erase("spec");
    j["fixture"] = s.fixture;
  }
  if (s.seed) j["seed"] = *s.seed;
  if (s.jobs) j["jobs"] = *s.jobs;
  return maplim::ExperimentConfig::from_json(j);
}

int run(const Selection& s, const std::string& out_dir, bool dump_paths) {
  maplim::ExperimentConfig config;
  try {
    config = load_config(s);
    maplim::build_experiment(config);
  } catch (const maplim::ValidationError& e) {
    std::cerr << "maplim: schema error: " << e.what() << '\n';
    return kExitSchema;
  } catch (const maplim::StructuralError& e) {
    std::cerr << "maplim: schema error: " << e.what() << '\n';
    return kExitSchema;
  } catch (const maplim::HypothesisViolation& e) {
    std::cerr << "maplim: rejected: " << e.what() << '\n';
    return kExitSchema;
  } catch (const std::exception& e) {
    std::cerr << "maplim: setup error: " << e.what() << '\n';
    return kExitSimulation;
  }
  maplim::ConvergenceReport report;
  try {
    report = maplim::run_experiment(config);
    maplim::write_outputs(report, config, out_dir, dump_paths);
  } catch (const std::exception& e) {
    std::cerr << "maplim: simulation error: " << e.what() << '\n';
    return kExitSimulation;
  }
  for (const std::string& w : report.warnings) std::cerr << "maplim: warning: " << w << '\n';
  for (const maplim::ReportRow& r : report.rows) {
    if (r.tier == maplim::GateTier::kInfo) continue;
    std::cout << report.fixture << " n=" << r.n << ' ' << r.statistic << " = " << r.value
              << " (target " << r.target << ", tolerance " << r.tolerance << ", "
              << maplim::to_string(r.tier) << ") " << maplim::to_string(r.outcome) << '\n';
  }
  for (const std::string& note : report.notes) std::cout << "note: " << note << '\n';
  std::cout << "config hash " << report.config_hash << "; reports in " << out_dir << '\n';
  if (!report.structural_pass()) {
    std::cerr << "maplim: structural gate failed\n";
    return kExitGate;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scaling limits of non-increasing Markov chains with types"};
  app.require_subcommand(1);

  Selection run_sel;
  std::string out_dir = "maplim-out";
  bool dump_paths = false;
  CLI::App* run_cmd = app.add_subcommand("run", "Run an experiment and write reports");
  add_selection(run_cmd, run_sel);
  run_cmd->add_option("--out", out_dir, "Output directory");
  run_cmd->add_flag("--dump-paths", dump_paths, "Write sample chain paths to paths/*.csv");

  bool list_json = false;
  CLI::App* list_cmd = app.add_subcommand("list-fixtures", "Print the built-in fixtures");
  list_cmd->add_flag("--json", list_json, "Print the full fixture specs as JSON");

  Selection validate_sel;
  CLI::App* validate_cmd =
      app.add_subcommand("validate", "Check a config and print its resolved form");
  add_selection(validate_cmd, validate_sel);

  std::string psi_spec;
  std::string psi_fixture;
  std::vector<double> qs{0.25, 0.5, 1.0, 2.0, 3.0, 4.0};
  std::string psi_out;
  CLI::App* psi_cmd = app.add_subcommand("psi-eval", "Tabulate Laplace exponents");
  psi_cmd->add_option("--spec", psi_spec,
                      "JSON file holding 'psi', 'measure' or 'characteristics'");
  psi_cmd->add_option("--fixture", psi_fixture, "Tabulate the limit of a built-in fixture");
  psi_cmd->add_option("--q", qs, "Arguments q")->delimiter(',');
  psi_cmd->add_option("--out", psi_out, "Output CSV (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitSchema;
  }

  if (*run_cmd) return run(run_sel, out_dir, dump_paths);

  if (*list_cmd) {
    if (list_json) {
      maplim::Json all = maplim::Json::array();
      for (const auto& f : maplim::list_fixtures()) all.push_back(f.spec);
      std::cout << all.dump(2) << '\n';
    } else {
      for (const auto& f : maplim::list_fixtures()) {
        std::cout << f.name << "\t" << f.regime << "\t" << f.description << '\n';
      }
    }
    return 0;
  }

  if (*validate_cmd) {
    try {
      const maplim::ExperimentConfig config = load_config(validate_sel);
      maplim::build_experiment(config);
      maplim::Json j = config.to_json();
      j["config_hash"] = config.hash();
      std::cout << j.dump(2) << '\n';
      return 0;
    } catch (const maplim::Error& e) {
      std::cerr << "maplim: schema error: " << e.what() << '\n';
      return kExitSchema;
    }
  }

  if (*psi_cmd) {
    try {
      maplim::Json spec;
      if (!psi_fixture.empty()) {
        spec = {{"fixture", psi_fixture}};
      } else if (!psi_spec.empty()) {
        std::ifstream in(psi_spec);
        if (!in) throw maplim::ValidationError("cannot open " + psi_spec);
        try {
          spec = maplim::Json::parse(in);
        } catch (const maplim::Json::exception& e) {
          throw maplim::ValidationError(std::string("spec is not valid JSON: ") + e.what());
        }
      } else {
        throw maplim::ValidationError("psi-eval needs --spec or --fixture");
      }
      if (psi_out.empty()) {
        maplim::write_psi_table(spec, qs, std::cout);
      } else {
        std::ofstream out(psi_out);
        maplim::write_psi_table(spec, qs, out);
      }
      return 0;
    } catch (const maplim::ValidationError& e) {
      std::cerr << "maplim: schema error: " << e.what() << '\n';
      return kExitSchema;
    } catch (const std::exception& e) {
      std::cerr << "maplim: evaluation error: " << e.what() << '\n';
      return kExitSimulation;
    }
  }
  return 0;
}
