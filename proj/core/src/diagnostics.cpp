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

#include "maplim/diagnostics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "maplim/error.hpp"
#include "maplim/lamperti.hpp"
#include "maplim/parallel.hpp"

namespace maplim {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Shortest representation that round-trips.
std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_time(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", t);
  return buf;
}

// Rounds to 40 mantissa bits so that atoms computed along different routes
// (e.g. 2^-k versus exp(-k log 2)) compare equal.
double snap(double v) {
  if (v == 0.0 || !std::isfinite(v)) return v;
  int e = 0;
  const double m = std::frexp(v, &e);
  return std::ldexp(std::round(std::ldexp(m, 40)), e - 40);
}

void require_nonempty(const EmpiricalSample& s) {
  if (s.empty()) throw ValidationError("empirical sample is empty");
}

}  // namespace

EmpiricalSample::EmpiricalSample(std::vector<double> values,
                                 std::optional<SeedProvenance> provenance)
    : values_(std::move(values)), provenance_(provenance) {
  for (double v : values_) {
    if (std::isnan(v)) throw ValidationError("empirical sample contains NaN");
  }
  std::sort(values_.begin(), values_.end());
  if (provenance_ && provenance_->count != values_.size()) {
    throw ValidationError("sample size does not match its provenance record");
  }
}

double EmpiricalSample::cdf(double x) const {
  require_nonempty(*this);
  const auto it = std::upper_bound(values_.begin(), values_.end(), x);
  return static_cast<double>(it - values_.begin()) /
         static_cast<double>(values_.size());
}

double ks_distance(const EmpiricalSample& a, const EmpiricalSample& b) {
  require_nonempty(a);
  require_nonempty(b);
  const auto& x = a.values();
  const auto& y = b.values();
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  // The remaining tail of one sample only moves its CDF towards 1.
  d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  return std::min(d, 1.0);
}

double ks_distance(const EmpiricalSample& sample, const Cdf& reference) {
  require_nonempty(sample);
  const auto& x = sample.values();
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < x.size()) {
    const double v = x[i];
    const double below = static_cast<double>(i) / n;
    while (i < x.size() && x[i] == v) ++i;
    const double at = static_cast<double>(i) / n;
    const double f = std::clamp(reference(v), 0.0, 1.0);
    d = std::max({d, std::abs(at - f), std::abs(f - below)});
  }
  return std::min(d, 1.0);
}

double ks_critical_value(std::size_t n, std::size_t m) {
  if (n == 0 || m == 0) throw ValidationError("KS critical value needs nonempty samples");
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  return 1.949 * std::sqrt((dn + dm) / (dn * dm));
}

MomentEstimate moment_estimate(const EmpiricalSample& sample, double a) {
  require_nonempty(sample);
  if (!(a >= 0.0) || !std::isfinite(a)) {
    throw ValidationError("moment order must be finite and >= 0");
  }
  std::vector<double> y;
  y.reserve(sample.size());
  for (double v : sample.values()) y.push_back(std::pow(std::abs(v), a));
  const double n = static_cast<double>(y.size());
  const double y0 = y.front();
  double shift = 0.0;
  for (double v : y) shift += v - y0;
  const double mean = y0 + shift / n;
  if (y.size() == 1) return {mean, kNaN};
  if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y0; })) {
    return {y0, 0.0};
  }
  // Leave-one-out means are (S - y_i) / (n - 1); their spread gives
  // se^2 = sum (y_i - mean)^2 / (n (n - 1)).
  double ss = 0.0;
  for (double v : y) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n * (n - 1.0)))};
}

std::vector<double> occupation_measure(const SteppedPath& path, double eps, int kappa) {
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("eps must lie in (0, 1)");
  if (kappa < 1) throw ValidationError("kappa must be >= 1");
  if (path.empty()) throw ValidationError("occupation of an empty path");
  const auto& times = path.times();
  const auto& pos = path.positions();
  const auto& types = path.types();
  std::size_t stop = path.size();
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (pos[k] <= eps) {
      stop = k;
      break;
    }
  }
  if (stop == path.size()) throw ValidationError("path never reaches the eps level");
  if (times[stop] <= 0.0) {
    throw DegenerateError("path starts at or below eps; empty occupation window");
  }
  std::vector<double> occ(kappa, 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < stop; ++k) {
    if (types[k] < 1 || types[k] > kappa) {
      throw ValidationError("path type " + std::to_string(types[k]) +
                            " outside 1.." + std::to_string(kappa));
    }
    const double dur = times[k + 1] - times[k];
    occ[types[k] - 1] += dur;
    total += dur;
  }
  for (double& v : occ) v /= total;
  return occ;
}

double self_similarity_check(const MapCharacteristics& chars, double gamma, double x,
                             double t, std::int64_t replicates, Stream& rng,
                             std::optional<double> scaling_gamma, int start_type) {
  if (!(x > 0.0) || !std::isfinite(x)) throw ValidationError("start scale must be > 0");
  if (!(t >= 0.0)) throw ValidationError("time must be >= 0");
  if (!(gamma > 0.0)) throw ValidationError("gamma must be > 0");
  if (replicates < 1) throw ValidationError("replicates must be >= 1");
  const double g = scaling_gamma.value_or(gamma);
  const MapSimulator sim(chars);
  const StopRule stop = StopRule::converged(1e-12, gamma);
  const double t_scaled = std::pow(x, -g) * t;
  std::vector<double> left;
  std::vector<double> right;
  left.reserve(replicates);
  right.reserve(replicates);
  for (std::int64_t r = 0; r < replicates; ++r) {
    const MapPath a = sim.simulate(start_type, stop, rng);
    left.push_back(lamperti_transform_map(a, gamma, x).value_at(t));
    const MapPath b = sim.simulate(start_type, stop, rng);
    right.push_back(x * lamperti_transform_map(b, gamma, 1.0).value_at(t_scaled));
  }
  return ks_distance(EmpiricalSample(std::move(left)), EmpiricalSample(std::move(right)));
}

// ---------------------------------------------------------------------------
// Reports

std::string to_string(GateTier tier) {
  switch (tier) {
    case GateTier::kStatistical:
      return "statistical";
    case GateTier::kStructural:
      return "structural";
    case GateTier::kInfo:
      return "info";
  }
  return "info";
}

std::string to_string(GateOutcome outcome) {
  switch (outcome) {
    case GateOutcome::kPass:
      return "pass";
    case GateOutcome::kFail:
      return "fail";
    case GateOutcome::kSkipped:
      return "skipped";
    case GateOutcome::kInfo:
      return "info";
  }
  return "info";
}

void ConvergenceReport::validate() const {
  if (n_grid.empty()) throw ValidationError("report n-grid is empty");
  for (std::size_t k = 1; k < n_grid.size(); ++k) {
    if (n_grid[k] <= n_grid[k - 1]) {
      throw ValidationError("report n-grid must be strictly increasing");
    }
  }
}

bool ConvergenceReport::structural_pass() const {
  return std::none_of(rows.begin(), rows.end(), [](const ReportRow& r) {
    return r.tier == GateTier::kStructural && r.outcome == GateOutcome::kFail;
  });
}

bool ConvergenceReport::statistical_pass() const {
  return std::none_of(rows.begin(), rows.end(), [](const ReportRow& r) {
    return r.tier == GateTier::kStatistical && r.outcome == GateOutcome::kFail;
  });
}

nlohmann::json ConvergenceReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const ReportRow& r : rows) {
    rows_json.push_back({{"n", r.n},
                         {"statistic", r.statistic},
                         {"value", r.value},
                         {"std_error", r.std_error},
                         {"target", r.target},
                         {"tolerance", r.tolerance},
                         {"tier", to_string(r.tier)},
                         {"outcome", to_string(r.outcome)}});
  }
  return {{"fixture", fixture},
          {"regime", regime},
          {"n_grid", n_grid},
          {"seed", seed},
          {"replicates", replicates},
          {"limit_replicates", limit_replicates},
          {"config_hash", config_hash},
          {"structural_pass", structural_pass()},
          {"statistical_pass", statistical_pass()},
          {"rows", rows_json},
          {"warnings", warnings},
          {"notes", notes}};
}

void ConvergenceReport::write_csv(std::ostream& out) const {
  out << "# config_hash: " << config_hash << '\n';
  out << "fixture,n,statistic,value,target,tolerance,pass\n";
  for (const ReportRow& r : rows) {
    out << fixture << ',' << r.n << ',' << r.statistic << ','
        << format_double(r.value) << ',' << format_double(r.target) << ','
        << format_double(r.tolerance) << ',' << to_string(r.outcome) << '\n';
  }
}

void ChainExperiment::validate() const {
  if (!kernel) throw ValidationError("experiment has no kernel");
  if (n_grid.empty()) throw ValidationError("n-grid must be nonempty");
  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    if (n_grid[k] < 1) throw ValidationError("grid sizes must be >= 1");
    if (k > 0 && n_grid[k] <= n_grid[k - 1]) {
      throw ValidationError("n-grid must be strictly increasing");
    }
  }
  if (replicates < 1) throw ValidationError("replicates must be >= 1");
  if (!(gamma > 0.0)) throw ValidationError("gamma must be > 0");
  const int kappa = kernel->kappa();
  if (start_type < 1 || start_type > kappa) {
    throw ValidationError("start type outside 1.." + std::to_string(kappa));
  }
  for (std::int64_t n : n_grid) {
    if (kernel->is_absorbing(n) || kernel->leave_probability({n, start_type}) <= 0.0) {
      throw HypothesisViolation("kernel never leaves (" + std::to_string(n) + ", " +
                                std::to_string(start_type) +
                                "); no scaling limit hypothesis can hold");
    }
  }
  if (limit) {
    const MapCharacteristics& c = limit->characteristics();
    if (limit_start_type < 1 || limit_start_type > c.kappa) {
      throw ValidationError("limit start type out of range");
    }
    const NonConstancy nc = check_not_constant(c);
    if (!nc.ok) {
      throw HypothesisViolation("limit process is constant from type " +
                                std::to_string(nc.witness));
    }
  } else if (!absorption_target) {
    throw ValidationError("experiment needs a limit process or an absorption target");
  }
  if (occupation_target) {
    if (static_cast<int>(occupation_target->size()) != kappa) {
      throw ValidationError("occupation target needs one entry per type");
    }
    if (!(occupation_eps > 0.0 && occupation_eps < 1.0)) {
      throw ValidationError("occupation eps must lie in (0, 1)");
    }
  }
  if (first_switch && !limit) {
    throw ValidationError("first-switch comparison needs a limit process");
  }
}

ReplicateRecord simulate_replicate(const ChainExperiment& exp, std::int64_t n,
                                   Stream& rng) {
  ChainOptions opts;
  opts.max_steps = exp.max_steps;
  const ChainRunResult r = run_chain(*exp.kernel, {n, exp.start_type}, rng, opts);
  const double scale = std::pow(static_cast<double>(n), exp.gamma);
  ReplicateRecord rec;
  rec.steps = r.steps;
  rec.absorption = static_cast<double>(r.absorption_time) / scale;
  const std::int64_t t1 = r.type_change_time(1);
  rec.first_switch = static_cast<double>(t1) / scale;
  rec.switch_type = r.type_changes.empty() ? 0 : r.path.type_at(static_cast<double>(t1));
  const SteppedPath y = rescale_path(r, n, exp.gamma);
  // Absorbed chains sit in the cemetery state 0, whatever position they froze at.
  for (double t : exp.marginal_times) {
    rec.marginals.push_back(t >= rec.absorption ? 0.0 : y.position_at(t));
  }
  if (exp.occupation_target) {
    const LampertiResult z = discrete_lamperti(r, n, exp.gamma);
    rec.occupation = occupation_measure(z.g, exp.occupation_eps, exp.kernel->kappa());
  }
  return rec;
}

ReplicateRecord simulate_limit_replicate(const ChainExperiment& exp, Stream& rng) {
  const MapSimulator& sim = *exp.limit;
  const MapPath path = sim.simulate(
      exp.limit_start_type, StopRule::converged(exp.limit_tolerance, exp.gamma), rng);
  const FunctionalEstimate f =
      exponential_functional(path, exp.gamma, sim.moment_vector(exp.gamma));
  ReplicateRecord rec;
  rec.absorption = f.value + f.residual;
  const LampertiPath x = lamperti_transform_map(path, exp.gamma, 1.0);
  rec.first_switch = x.known_until();
  for (const LampertiPath::Segment& s : x.segments()) {
    if (s.type != exp.limit_start_type) {
      rec.first_switch = s.theta;
      rec.switch_type = s.type;
      break;
    }
  }
  for (double t : exp.marginal_times) rec.marginals.push_back(x.value_at(t));
  return rec;
}

namespace {

ReportRow statistical_mean_row(std::int64_t n, const std::string& name,
                               const MomentEstimate& m, double target,
                               std::int64_t replicates) {
  ReportRow row{n, name, m.value, m.std_error, target, 3.0 * m.std_error,
                GateTier::kStatistical, GateOutcome::kSkipped};
  if (replicates > 1) {
    row.outcome = std::abs(m.value - target) <= row.tolerance ? GateOutcome::kPass
                                                              : GateOutcome::kFail;
  }
  return row;
}

ReportRow bound_row(std::int64_t n, const std::string& name, double value,
                    double target, double tolerance, GateTier tier) {
  return {n, name, value, kNaN, target, tolerance, tier,
          std::abs(value - target) <= tolerance ? GateOutcome::kPass
                                                : GateOutcome::kFail};
}

EmpiricalSample column(const std::vector<ReplicateRecord>& recs,
                       double ReplicateRecord::*field, SeedProvenance prov) {
  std::vector<double> v;
  v.reserve(recs.size());
  for (const ReplicateRecord& r : recs) v.push_back(r.*field);
  return EmpiricalSample(std::move(v), prov);
}

}  // namespace

ConvergenceReport convergence_report(const ChainExperiment& exp) {
  exp.validate();
  ConvergenceReport rep;
  rep.fixture = exp.fixture;
  rep.regime = exp.regime;
  rep.n_grid = exp.n_grid;
  rep.seed = exp.seed;
  rep.replicates = exp.replicates;
  rep.notes.push_back("chain replicate r at grid index k uses Stream(seed, r, k)");
  if (exp.replicates == 1) {
    rep.warnings.push_back(
        "replicates = 1: standard errors are undefined, statistical gates skipped");
  }

  std::vector<ReplicateRecord> limit_recs;
  SeedProvenance limit_prov{exp.seed, ChainExperiment::kLimitSubstream, 0, 0};
  double target = exp.absorption_target.value_or(kNaN);
  if (exp.limit) {
    const std::int64_t count =
        exp.limit_replicates > 0 ? exp.limit_replicates : exp.replicates;
    rep.limit_replicates = count;
    limit_prov.count = static_cast<std::uint64_t>(count);
    limit_recs.resize(count);
    parallel_for(count, exp.jobs, [&](std::int64_t r) {
      Stream rng(exp.seed, static_cast<std::uint64_t>(r), ChainExperiment::kLimitSubstream);
      limit_recs[r] = simulate_limit_replicate(exp, rng);
    });
    if (!exp.absorption_target) {
      target = exp.limit->moment_vector(exp.gamma)[exp.limit_start_type - 1];
    }
    rep.notes.push_back("limit replicate r uses Stream(seed, r, " +
                        std::to_string(ChainExperiment::kLimitSubstream) + ")");
  }

  for (std::size_t k = 0; k < exp.n_grid.size(); ++k) {
    const std::int64_t n = exp.n_grid[k];
    std::vector<ReplicateRecord> recs(exp.replicates);
    parallel_for(exp.replicates, exp.jobs, [&](std::int64_t r) {
      Stream rng(exp.seed, static_cast<std::uint64_t>(r), static_cast<std::uint32_t>(k));
      recs[r] = simulate_replicate(exp, n, rng);
    });
    const SeedProvenance prov{exp.seed, static_cast<std::uint32_t>(k), 0,
                              static_cast<std::uint64_t>(exp.replicates)};
    const EmpiricalSample a = column(recs, &ReplicateRecord::absorption, prov);
    const MomentEstimate mean = moment_estimate(a, 1.0);
    rep.rows.push_back(
        statistical_mean_row(n, "absorption_mean", mean, target, exp.replicates));
    if (exp.mean_tolerance) {
      const double tol =
          exp.mean_relative ? *exp.mean_tolerance * std::abs(target) : *exp.mean_tolerance;
      rep.rows.push_back(bound_row(n, "absorption_mean_bound", mean.value, target, tol,
                                   GateTier::kStructural));
    }
    if (exp.sd_bound) {
      const double sd = mean.std_error * std::sqrt(static_cast<double>(exp.replicates));
      ReportRow row{n, "absorption_sd", sd, kNaN, 0.0, *exp.sd_bound,
                    GateTier::kStructural,
                    sd < *exp.sd_bound ? GateOutcome::kPass : GateOutcome::kFail};
      if (exp.replicates == 1) row.outcome = GateOutcome::kSkipped;
      rep.rows.push_back(row);
    }
    if (exp.limit && exp.absorption_law) {
      const EmpiricalSample la = column(limit_recs, &ReplicateRecord::absorption, limit_prov);
      const double d = ks_distance(a, la);
      if (exp.absorption_ks_tolerance) {
        rep.rows.push_back({n, "absorption_ks", d, kNaN, 0.0, *exp.absorption_ks_tolerance,
                            GateTier::kStructural,
                            d < *exp.absorption_ks_tolerance ? GateOutcome::kPass
                                                             : GateOutcome::kFail});
      } else {
        const double crit = ks_critical_value(a.size(), la.size());
        rep.rows.push_back({n, "absorption_ks", d, kNaN, 0.0, crit,
                            GateTier::kStatistical,
                            d < crit ? GateOutcome::kPass : GateOutcome::kFail});
      }
    }
    if (exp.limit) {
      for (std::size_t t = 0; t < exp.marginal_times.size(); ++t) {
        std::vector<double> xs;
        std::vector<double> ys;
        for (const ReplicateRecord& r : recs) xs.push_back(snap(r.marginals[t]));
        for (const ReplicateRecord& r : limit_recs) ys.push_back(snap(r.marginals[t]));
        const double dm = ks_distance(EmpiricalSample(std::move(xs)),
                                      EmpiricalSample(std::move(ys)));
        const double crit = ks_critical_value(recs.size(), limit_recs.size());
        rep.rows.push_back({n, "marginal_ks_t=" + format_time(exp.marginal_times[t]), dm,
                            kNaN, 0.0, crit, GateTier::kStatistical,
                            dm < crit ? GateOutcome::kPass : GateOutcome::kFail});
      }
    }
    if (exp.occupation_target) {
      const int kappa = exp.kernel->kappa();
      std::vector<double> occ(kappa, 0.0);
      for (const ReplicateRecord& r : recs) {
        for (int i = 0; i < kappa; ++i) occ[i] += r.occupation[i];
      }
      for (int i = 0; i < kappa; ++i) {
        occ[i] /= static_cast<double>(recs.size());
        rep.rows.push_back(bound_row(n, "occupation_" + std::to_string(i + 1), occ[i],
                                     (*exp.occupation_target)[i],
                                     exp.occupation_tolerance, GateTier::kStructural));
      }
    }
    if (exp.first_switch) {
      const EmpiricalSample s = column(recs, &ReplicateRecord::first_switch, prov);
      const EmpiricalSample ls =
          column(limit_recs, &ReplicateRecord::first_switch, limit_prov);
      const double d = ks_distance(s, ls);
      rep.rows.push_back({n, "first_switch_ks", d, kNaN, 0.0, exp.first_switch_tolerance,
                          GateTier::kStructural,
                          d < exp.first_switch_tolerance ? GateOutcome::kPass
                                                         : GateOutcome::kFail});
      const MapCharacteristics& c = exp.limit->characteristics();
      const int from = exp.limit_start_type;
      const double rate = c.switch_rate(from);
      std::int64_t switched = 0;
      std::vector<std::int64_t> counts(c.kappa + 1, 0);
      for (const ReplicateRecord& r : recs) {
        if (r.switch_type > 0 && r.switch_type <= c.kappa) {
          ++switched;
          ++counts[r.switch_type];
        }
      }
      for (int j = 1; j <= c.kappa; ++j) {
        if (j == from) continue;
        const double frac = switched > 0 ? static_cast<double>(counts[j]) /
                                               static_cast<double>(switched)
                                         : kNaN;
        const double want = rate > 0.0 ? c.lambda[from - 1][j - 1] / rate : 0.0;
        ReportRow row = bound_row(n, "switch_type_" + std::to_string(j), frac, want,
                                  exp.switch_type_tolerance, GateTier::kStructural);
        if (switched == 0) row.outcome = GateOutcome::kFail;
        rep.rows.push_back(row);
      }
    }
    double steps = 0.0;
    for (const ReplicateRecord& r : recs) steps += static_cast<double>(r.steps);
    rep.rows.push_back({n, "mean_steps", steps / static_cast<double>(recs.size()), kNaN,
                        kNaN, kNaN, GateTier::kInfo, GateOutcome::kInfo});
  }
  return rep;
}

}  // namespace maplim
