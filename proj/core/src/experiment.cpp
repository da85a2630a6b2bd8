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

#include "maplim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <fstream>
#include <ostream>
#include <set>

#include "maplim/error.hpp"
#include "maplim/parallel.hpp"

namespace maplim {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* const kFixtureSource = R"json([
{
  "name": "halving-monotype",
  "regime": "monotype",
  "description": "one type; n -> floor(n/2) with probability 1/n, else stay",
  "kernel": {"kind": "product",
             "laws": [{"kind": "scaled_jump", "ratio": 0.5, "rate": 1, "exponent": 1}],
             "types": {"kind": "constant", "p": [[1]]}},
  "gamma": 1,
  "start_type": 1,
  "limit": {"kind": "solo", "spec": {"gamma": 1, "type": 1, "mu": {"atoms": [[0.5, 0.5]]}}},
  "defaults": {"n_grid": [1024, 4096, 16384], "replicates": 10000},
  "gates": {"mean_tolerance": 0.05}
},
{
  "name": "critical-two-type",
  "regime": "critical",
  "description": "two halving types; type switches with probability 1/n (beta = gamma = 1)",
  "kernel": {"kind": "product",
             "laws": [{"kind": "scaled_jump", "ratio": 0.5, "rate": 1, "exponent": 1},
                      {"kind": "scaled_jump", "ratio": 0.5, "rate": 1, "exponent": 1}],
             "types": {"kind": "perturbed", "q": [[-1, 1], [1, -1]], "beta": 1}},
  "gamma": 1,
  "start_type": 1,
  "limit": {"kind": "critical",
            "spec": {"gamma": 1,
                     "mu": [[{"atoms": [[0.5, 0.5]]}, {"atoms": [[1, 1]]}],
                            [{"atoms": [[1, 1]]}, {"atoms": [[0.5, 0.5]]}]]}},
  "defaults": {"n_grid": [1024, 4096, 16384], "replicates": 10000},
  "gates": {"first_switch_tolerance": 0.03, "switch_type_tolerance": 0.02}
},
{
  "name": "mixing-two-type",
  "regime": "mixing",
  "description": "two halving types; type matrix I + Q with Q = [[-0.1, 0.1], [0.2, -0.2]] (beta = 0)",
  "kernel": {"kind": "product",
             "laws": [{"kind": "scaled_jump", "ratio": 0.5, "rate": 1, "exponent": 1},
                      {"kind": "scaled_jump", "ratio": 0.5, "rate": 1, "exponent": 1}],
             "types": {"kind": "perturbed", "q": [[-0.1, 0.1], [0.2, -0.2]], "beta": 0}},
  "gamma": 1,
  "start_type": 1,
  "limit": {"kind": "mixing",
            "spec": {"gamma": 1, "beta": 0,
                     "mu": [{"atoms": [[0.5, 0.5]]}, {"atoms": [[0.5, 0.5]]}],
                     "q": [[-0.1, 0.1], [0.2, -0.2]]}},
  "defaults": {"n_grid": [4096, 16384, 65536], "replicates": 2000},
  "gates": {"mean_tolerance": 0.05, "mean_relative": true,
            "occupation_eps": 0.05, "occupation_tolerance": 0.03}
},
{
  "name": "solo-two-type",
  "regime": "solo",
  "description": "type 1 halves, type 2 quarters; type switches with probability n^-1.5",
  "kernel": {"kind": "product",
             "laws": [{"kind": "scaled_jump", "ratio": 0.5, "rate": 1, "exponent": 1},
                      {"kind": "scaled_jump", "ratio": 0.25, "rate": 1, "exponent": 1}],
             "types": {"kind": "perturbed", "q": [[-1, 1], [1, -1]], "beta": 1.5}},
  "gamma": 1,
  "start_type": 1,
  "limit": {"kind": "solo", "spec": {"gamma": 1, "type": 1, "mu": {"atoms": [[0.5, 0.5]]}}},
  "defaults": {"n_grid": [1024, 4096, 16384], "replicates": 10000},
  "gates": {"absorption_ks_tolerance": 0.03}
},
{
  "name": "coalescent-beta",
  "regime": "monotype",
  "description": "block counting of the Beta(1.5, 0.5)-coalescent, gamma = 1/2",
  "kernel": {"kind": "product",
             "laws": [{"kind": "coalescent",
                       "lambda": {"density": {"kind": "beta", "a": 1.5, "b": 0.5}}}],
             "types": {"kind": "constant", "p": [[1]]}},
  "gamma": 0.5,
  "start_type": 1,
  "limit": {"kind": "coalescent"},
  "defaults": {"n_grid": [1024, 4096, 16384], "replicates": 10000, "limit_replicates": 4000},
  "gates": {"hypothesis_lambdas": [1, 2], "hypothesis_tolerance": 0.05,
            "tail_oscillation": 0.1}
},
{
  "name": "barrier-geometric",
  "regime": "finite-mean barrier",
  "description": "two-type walk below a barrier; geometric increments with means 2 and 4",
  "kernel": {"kind": "barrier",
             "p": [[0.7, 0.3], [0.3, 0.7]],
             "increments": [[{"kind": "geometric", "p": 0.5}, {"kind": "geometric", "p": 0.5}],
                            [{"kind": "geometric", "p": 0.25}, {"kind": "geometric", "p": 0.25}]]},
  "gamma": 1,
  "start_type": 1,
  "limit": {"kind": "barrier"},
  "defaults": {"n_grid": [4096, 16384, 65536], "replicates": 1000},
  "gates": {"sd_bound": 0.02, "absorption_law": false, "marginals": false}
}
])json";

const std::set<std::string> kGateKeys = {
    "mean_tolerance",         "mean_relative",         "absorption_ks_tolerance",
    "absorption_law",         "marginals",             "sd_bound",
    "occupation_eps",         "occupation_tolerance",  "first_switch_tolerance",
    "switch_type_tolerance",  "hypothesis_lambdas",    "hypothesis_tolerance",
    "tail_oscillation"};

const std::set<std::string> kConfigKeys = {
    "fixture", "spec",  "seed", "n_grid", "replicates", "limit_replicates",
    "gamma",   "beta",  "tolerances", "jobs"};

const std::set<std::string> kSpecKeys = {"name",  "regime",     "description", "kernel",
                                         "gamma", "start_type", "limit",       "defaults",
                                         "gates"};

std::vector<std::int64_t> integer_list(const Json& v, const std::string& what) {
  if (!v.is_array()) throw ValidationError("'" + what + "' must be an array");
  std::vector<std::int64_t> out;
  for (const Json& e : v) {
    if (!e.is_number_integer()) throw ValidationError("'" + what + "' must hold integers");
    out.push_back(e.get<std::int64_t>());
  }
  return out;
}

std::int64_t integer(const Json& v, const std::string& what) {
  if (!v.is_number_integer()) throw ValidationError("'" + what + "' must be an integer");
  return v.get<std::int64_t>();
}

double real(const Json& v, const std::string& what) {
  if (!v.is_number()) throw ValidationError("'" + what + "' must be a number");
  return v.get<double>();
}

bool flag(const Json& v, const std::string& what) {
  if (!v.is_boolean()) throw ValidationError("'" + what + "' must be true or false");
  return v.get<bool>();
}

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& what) {
  if (!j.is_object()) throw ValidationError(what + " must be a JSON object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      throw ValidationError("unknown key '" + item.key() + "' in " + what);
    }
  }
}

void check_spec(const Json& spec) {
  check_keys(spec, kSpecKeys, "fixture spec");
  for (const char* key : {"kernel", "gamma", "limit"}) {
    if (!spec.contains(key)) throw ValidationError(std::string("spec is missing '") + key + "'");
  }
  real(spec.at("gamma"), "gamma");
  if (spec.contains("gates")) check_keys(spec.at("gates"), kGateKeys, "gates");
}

CoalescentEnvSpec coalescent_env(const Json& spec) {
  const Json& kernel = spec.at("kernel");
  if (!kernel.contains("laws") || !kernel.at("laws").is_array()) {
    throw ValidationError("coalescent limit needs a product kernel of coalescent laws");
  }
  CoalescentEnvSpec env;
  for (const Json& law : kernel.at("laws")) {
    if (!law.contains("kind") || law.at("kind") != "coalescent") {
      throw ValidationError("coalescent limit needs every position law to be a coalescent");
    }
    env.lambda.push_back(measure_from_json(law.at("lambda")));
  }
  env.gamma = real(spec.at("gamma"), "gamma");
  env.types = type_family_from_json(kernel.at("types"));
  env.validate();
  return env;
}

std::vector<double> coalescent_constants(const Json& limit, const CoalescentEnvSpec& env) {
  if (!limit.contains("c")) return {};
  const Json& c = limit.at("c");
  std::vector<double> out;
  if (!c.is_array()) throw ValidationError("'c' must be an array");
  for (const Json& v : c) out.push_back(real(v, "c"));
  if (out.size() != env.lambda.size()) {
    throw ValidationError("'c' needs one tail constant per environment");
  }
  return out;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

const std::vector<FixtureInfo>& list_fixtures() {
  static const std::vector<FixtureInfo> fixtures = [] {
    std::vector<FixtureInfo> out;
    for (const Json& spec : Json::parse(kFixtureSource)) {
      out.push_back({spec.at("name").get<std::string>(), spec.at("regime").get<std::string>(),
                     spec.at("description").get<std::string>(), spec});
    }
    return out;
  }();
  return fixtures;
}

const FixtureInfo& find_fixture(const std::string& name) {
  for (const FixtureInfo& f : list_fixtures()) {
    if (f.name == name) return f;
  }
  throw ValidationError("unknown fixture '" + name + "' (see list-fixtures)");
}

std::uint64_t fnv1a64(const std::string& bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
  try {
    check_keys(j, kConfigKeys, "config");
    ExperimentConfig c;
    if (j.contains("fixture") == j.contains("spec")) {
      throw ValidationError("config needs exactly one of 'fixture' and 'spec'");
    }
    if (j.contains("fixture")) {
      if (!j.at("fixture").is_string()) throw ValidationError("'fixture' must be a string");
      c.fixture = j.at("fixture").get<std::string>();
      c.spec = find_fixture(c.fixture).spec;
    } else {
      c.spec = j.at("spec");
    }
    check_spec(c.spec);

    if (!j.contains("seed")) {
      throw ValidationError("missing field 'seed' (runs never draw entropy implicitly)");
    }
    const Json& seed = j.at("seed");
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
      throw ValidationError("'seed' must be a nonnegative integer");
    }
    c.seed = seed.get<std::uint64_t>();

    const Json defaults = c.spec.value("defaults", Json::object());
    c.n_grid = integer_list(j.contains("n_grid") ? j.at("n_grid")
                                                 : defaults.value("n_grid", Json::array()),
                            "n_grid");
    if (c.n_grid.empty()) throw ValidationError("'n_grid' must be nonempty");
    for (std::size_t k = 0; k < c.n_grid.size(); ++k) {
      if (c.n_grid[k] < 1 || (k > 0 && c.n_grid[k] <= c.n_grid[k - 1])) {
        throw ValidationError("'n_grid' must be strictly increasing positive integers");
      }
    }
    c.replicates = j.contains("replicates")
                       ? integer(j.at("replicates"), "replicates")
                       : integer(defaults.value("replicates", Json(0)), "replicates");
    if (c.replicates < 1) throw ValidationError("'replicates' must be >= 1");
    c.limit_replicates =
        j.contains("limit_replicates")
            ? integer(j.at("limit_replicates"), "limit_replicates")
            : integer(defaults.value("limit_replicates", Json(0)), "limit_replicates");
    if (c.limit_replicates < 0) throw ValidationError("'limit_replicates' must be >= 0");
    if (j.contains("jobs")) c.jobs = static_cast<int>(integer(j.at("jobs"), "jobs"));

    if (j.contains("gamma")) {
      const double g = real(j.at("gamma"), "gamma");
      c.spec["gamma"] = g;
      Json& limit = c.spec["limit"];
      if (limit.contains("spec")) limit["spec"]["gamma"] = g;
    }
    if (j.contains("beta")) {
      const double b = real(j.at("beta"), "beta");
      Json& types = c.spec["kernel"]["types"];
      if (!types.is_object() || types.value("kind", "") != "perturbed") {
        throw ValidationError("'beta' applies only to perturbed type families");
      }
      types["beta"] = b;
      Json& limit = c.spec["limit"];
      if (limit.contains("spec") && limit["spec"].contains("beta")) limit["spec"]["beta"] = b;
    }
    if (j.contains("tolerances")) {
      check_keys(j.at("tolerances"), kGateKeys, "tolerances");
      for (const auto& item : j.at("tolerances").items()) {
        c.spec["gates"][item.key()] = item.value();
      }
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed config: ") + e.what());
  }
}

Json ExperimentConfig::to_json() const {
  // Fixtures are stored resolved, so an inline copy hashes identically.
  return {{"spec", spec},
          {"seed", seed},
          {"n_grid", n_grid},
          {"replicates", replicates},
          {"limit_replicates", limit_replicates}};
}

std::string ExperimentConfig::hash() const { return hex64(fnv1a64(to_json().dump())); }

BuiltExperiment build_experiment(const ExperimentConfig& config) {
  try {
    const Json& spec = config.spec;
    check_spec(spec);
    BuiltExperiment b;
    ChainExperiment& e = b.chain;
    e.fixture = config.fixture.empty() ? spec.value("name", std::string("inline"))
                                       : config.fixture;
    e.regime = spec.value("regime", std::string("unspecified"));
    e.kernel = kernel_from_json(spec.at("kernel"));
    e.gamma = real(spec.at("gamma"), "gamma");
    e.start_type = static_cast<int>(integer(spec.value("start_type", Json(1)), "start_type"));
    e.n_grid = config.n_grid;
    e.replicates = config.replicates;
    e.limit_replicates = config.limit_replicates;
    e.seed = config.seed;
    e.jobs = config.jobs;

    const Json& limit = spec.at("limit");
    if (!limit.is_object() || !limit.contains("kind")) {
      throw ValidationError("'limit' must be an object with a 'kind'");
    }
    const std::string kind = limit.at("kind").get<std::string>();
    MapCharacteristics chars;
    e.limit_start_type = 1;
    if (kind == "solo") {
      chars = MapCharacteristics::monotype(
          limit_subordinator_solo(solo_spec_from_json(limit.at("spec"))));
    } else if (kind == "mixing") {
      chars = MapCharacteristics::monotype(
          limit_subordinator_mixing(mixing_spec_from_json(limit.at("spec"))));
    } else if (kind == "critical") {
      chars = limit_map_critical(critical_spec_from_json(limit.at("spec")));
      e.limit_start_type = e.start_type;
    } else if (kind == "map") {
      chars = characteristics_from_json(limit.at("characteristics"));
      e.limit_start_type = e.start_type;
    } else if (kind == "coalescent") {
      b.coalescent = coalescent_env(spec);
      chars = coalescent_limit(*b.coalescent, e.start_type,
                               coalescent_constants(limit, *b.coalescent));
      if (chars.kappa > 1) e.limit_start_type = e.start_type;
    } else if (kind == "barrier") {
      b.barrier = barrier_spec_from_json(spec.at("kernel"));
      if (limit.contains("heavy_tail_a")) {
        HeavyTailMode mode{{}, e.gamma};
        const Json& a = limit.at("heavy_tail_a");
        if (a.is_string() && a.get<std::string>() == "auto") {
          mode.a = barrier_tail_constants(*b.barrier, e.gamma);
        } else {
          if (!a.is_array()) throw ValidationError("'heavy_tail_a' must be an array or \"auto\"");
          for (const Json& v : a) mode.a.push_back(real(v, "heavy_tail_a"));
        }
        chars = MapCharacteristics::monotype(barrier_limit(*b.barrier, mode));
      } else {
        if (e.gamma != 1.0) {
          throw ValidationError("finite-mean barrier limits have gamma = 1");
        }
        const FiniteMeanLimit fm = barrier_limit(*b.barrier);
        chars = MapCharacteristics::monotype(LaplaceExponent(0.0, fm.m_weighted));
      }
    } else {
      throw ValidationError("unknown limit kind '" + kind + "'");
    }
    e.limit = std::make_shared<MapSimulator>(std::move(chars));

    b.gates = spec.value("gates", Json::object());
    const Json& g = b.gates;
    if (g.contains("mean_tolerance")) e.mean_tolerance = real(g.at("mean_tolerance"), "mean_tolerance");
    if (g.contains("mean_relative")) e.mean_relative = flag(g.at("mean_relative"), "mean_relative");
    if (g.contains("absorption_ks_tolerance")) {
      e.absorption_ks_tolerance = real(g.at("absorption_ks_tolerance"), "absorption_ks_tolerance");
    }
    if (g.contains("absorption_law")) e.absorption_law = flag(g.at("absorption_law"), "absorption_law");
    if (g.contains("marginals") && !flag(g.at("marginals"), "marginals")) e.marginal_times.clear();
    if (g.contains("sd_bound")) e.sd_bound = real(g.at("sd_bound"), "sd_bound");
    if (g.contains("occupation_tolerance")) {
      e.occupation_tolerance = real(g.at("occupation_tolerance"), "occupation_tolerance");
      e.occupation_eps = real(g.value("occupation_eps", Json(0.05)), "occupation_eps");
      if (b.barrier) {
        e.occupation_target = stationary_distribution_stochastic(b.barrier->p);
      } else {
        const auto& pk = dynamic_cast<const ProductKernel&>(*e.kernel);
        e.occupation_target = stationary_distribution(pk.types().generator());
      }
    }
    if (g.contains("first_switch_tolerance")) {
      e.first_switch = true;
      e.first_switch_tolerance = real(g.at("first_switch_tolerance"), "first_switch_tolerance");
      e.switch_type_tolerance =
          real(g.value("switch_type_tolerance", Json(0.02)), "switch_type_tolerance");
    }
    e.validate();
    return b;
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("malformed fixture spec: ") + ex.what());
  }
}

ConvergenceReport run_experiment(const ExperimentConfig& config) {
  const BuiltExperiment b = build_experiment(config);
  const ChainExperiment& e = b.chain;
  ConvergenceReport rep = convergence_report(e);
  rep.config_hash = config.hash();

  if (b.coalescent) {
    const CoalescentEnvSpec& env = *b.coalescent;
    std::vector<double> c = coalescent_constants(config.spec.at("limit"), env);
    for (std::size_t i = 0; i < env.lambda.size(); ++i) {
      const TailEstimate t = tail_constant(env.lambda[i], env.gamma);
      if (c.size() < env.lambda.size()) c.push_back(t.c);
      const std::string suffix = "_" + std::to_string(i + 1);
      rep.rows.push_back({0, "tail_constant" + suffix, t.c, kNaN, kNaN, kNaN,
                          GateTier::kInfo, GateOutcome::kInfo});
      if (b.gates.contains("tail_oscillation")) {
        const double tol = real(b.gates.at("tail_oscillation"), "tail_oscillation");
        rep.rows.push_back({0, "tail_oscillation" + suffix, t.oscillation, kNaN, 0.0, tol,
                            GateTier::kStructural,
                            t.oscillation <= tol ? GateOutcome::kPass : GateOutcome::kFail});
      }
    }
    if (b.gates.contains("hypothesis_tolerance")) {
      const double tol = real(b.gates.at("hypothesis_tolerance"), "hypothesis_tolerance");
      std::vector<double> lambdas{1.0, 2.0};
      if (b.gates.contains("hypothesis_lambdas")) {
        lambdas.clear();
        for (const Json& v : b.gates.at("hypothesis_lambdas")) {
          lambdas.push_back(real(v, "hypothesis_lambdas"));
        }
      }
      const int i = e.start_type;
      const LaplaceExponent psi = coalescent_limit_psi(env.lambda[i - 1], env.gamma, c[i - 1]);
      for (std::int64_t n : e.n_grid) {
        for (double lam : lambdas) {
          const double diag = kernel_moment_gen(*e.kernel, n, i, lam, env.gamma).diagnostic;
          const double target = psi(lam);
          const double err = std::abs(diag - target) / target;
          char name[64];
          std::snprintf(name, sizeof name, "hypothesis_rel_err_lambda=%g", lam);
          rep.rows.push_back({n, name, err, kNaN, 0.0, tol, GateTier::kStructural,
                              err < tol ? GateOutcome::kPass : GateOutcome::kFail});
        }
      }
    }
  }

  if (b.barrier && !config.spec.at("limit").contains("heavy_tail_a")) {
    const FiniteMeanLimit fm = barrier_limit(*b.barrier);
    rep.rows.push_back({0, "absorption_constant_sum_m", fm.absorption_sum, kNaN, kNaN, kNaN,
                        GateTier::kInfo, GateOutcome::kInfo});
    rep.rows.push_back({0, "absorption_constant_pi_weighted_m", fm.absorption_weighted, kNaN,
                        kNaN, kNaN, GateTier::kInfo, GateOutcome::kInfo});
    for (const ReportRow& r : std::vector<ReportRow>(rep.rows)) {
      if (r.statistic != "absorption_mean") continue;
      const bool weighted = std::abs(r.value - fm.absorption_weighted) <
                            std::abs(r.value - fm.absorption_sum);
      char buf[256];
      std::snprintf(buf, sizeof buf,
                    "n=%lld: mean A_n/n = %.6f is closer to %s = %.6f than to %s = %.6f",
                    static_cast<long long>(r.n), r.value,
                    weighted ? "1/sum(pi_i m_i)" : "1/sum(m_i)",
                    weighted ? fm.absorption_weighted : fm.absorption_sum,
                    weighted ? "1/sum(m_i)" : "1/sum(pi_i m_i)",
                    weighted ? fm.absorption_sum : fm.absorption_weighted);
      rep.notes.emplace_back(buf);
      rep.rows.push_back({r.n, "closer_to_pi_weighted", weighted ? 1.0 : 0.0, kNaN, kNaN,
                          kNaN, GateTier::kInfo, GateOutcome::kInfo});
    }
  }
  return rep;
}

void write_outputs(const ConvergenceReport& report, const ExperimentConfig& config,
                   const std::string& out_dir, bool dump_paths) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string hash = config.hash();
  {
    Json j = report.to_json();
    j["config"] = config.to_json();
    std::ofstream out(fs::path(out_dir) / "report.json");
    out << j.dump(2) << '\n';
    if (!out) throw Error("cannot write report.json in " + out_dir);
  }
  {
    std::ofstream out(fs::path(out_dir) / "report.csv");
    report.write_csv(out);
    if (!out) throw Error("cannot write report.csv in " + out_dir);
  }
  if (!dump_paths) return;
  const BuiltExperiment b = build_experiment(config);
  const fs::path dir = fs::path(out_dir) / "paths";
  fs::create_directories(dir);
  constexpr std::int64_t kPathsPerN = 5;
  for (std::size_t k = 0; k < config.n_grid.size(); ++k) {
    const std::int64_t n = config.n_grid[k];
    for (std::int64_t r = 0; r < std::min(kPathsPerN, config.replicates); ++r) {
      Stream rng(config.seed, static_cast<std::uint64_t>(r), static_cast<std::uint32_t>(k));
      ChainOptions opts;
      opts.max_steps = b.chain.max_steps;
      const ChainRunResult run = run_chain(*b.chain.kernel, {n, b.chain.start_type}, rng, opts);
      std::ofstream out(dir / ("n" + std::to_string(n) + "_r" + std::to_string(r) + ".csv"));
      out << "# config_hash: " << hash << '\n';
      run.path.write_csv(out);
    }
  }
}

void write_psi_table(const Json& spec, const std::vector<double>& qs, std::ostream& out) {
  std::vector<LaplaceExponent> psi;
  try {
    if (!spec.is_object()) throw ValidationError("psi-eval input must be a JSON object");
    if (spec.contains("psi")) {
      psi.push_back(laplace_exponent_from_json(spec.at("psi")));
    } else if (spec.contains("measure")) {
      psi.push_back(laplace_exponent_from_measure(measure_from_json(spec.at("measure"))));
    } else if (spec.contains("characteristics")) {
      psi = characteristics_from_json(spec.at("characteristics")).psi;
    } else if (spec.contains("fixture")) {
      ExperimentConfig c = ExperimentConfig::from_json(
          {{"fixture", spec.at("fixture")}, {"seed", 0}});
      psi = build_experiment(c).chain.limit->characteristics().psi;
    } else {
      throw ValidationError(
          "psi-eval input needs one of 'psi', 'measure', 'characteristics', 'fixture'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed psi-eval input: ") + e.what());
  }
  out << 'q';
  for (std::size_t i = 0; i < psi.size(); ++i) out << ",psi_" << i + 1;
  out << '\n';
  char buf[32];
  for (double q : qs) {
    std::snprintf(buf, sizeof buf, "%.17g", q);
    out << buf;
    for (const LaplaceExponent& p : psi) {
      std::snprintf(buf, sizeof buf, "%.17g", p(q));
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace maplim
