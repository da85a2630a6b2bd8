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

#include "maplim/serialize.hpp"

#include <string>
#include <utility>
#include <vector>

#include "maplim/error.hpp"

namespace maplim {
namespace {

const Json& field(const Json& j, const std::string& key) {
  if (!j.is_object()) throw ValidationError("expected an object holding '" + key + "'");
  const auto it = j.find(key);
  if (it == j.end()) throw ValidationError("missing field '" + key + "'");
  return *it;
}

double number(const Json& v, const std::string& what) {
  if (!v.is_number()) throw ValidationError("'" + what + "' must be a number");
  return v.get<double>();
}

double number(const Json& j, const std::string& key, double fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return number(j.at(key), key);
}

std::string text(const Json& j, const std::string& key) {
  const Json& v = field(j, key);
  if (!v.is_string()) throw ValidationError("'" + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> numbers(const Json& v, const std::string& what) {
  if (!v.is_array()) throw ValidationError("'" + what + "' must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const Json& e : v) out.push_back(number(e, what));
  return out;
}

std::vector<std::vector<double>> matrix(const Json& v, const std::string& what) {
  if (!v.is_array()) throw ValidationError("'" + what + "' must be an array of rows");
  std::vector<std::vector<double>> out;
  for (const Json& row : v) out.push_back(numbers(row, what));
  return out;
}

template <class F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
}

Json density_to_json(const Density& d) {
  if (d.kind() == Density::Kind::kBeta) {
    return {{"kind", "beta"}, {"a", d.a()}, {"b", d.b()}, {"scale", d.scale()}};
  }
  return {{"kind", "tabulated"}, {"xs", d.xs()}, {"ys", d.ys()}};
}

Density density_from_json(const Json& j) {
  const std::string kind = text(j, "kind");
  if (kind == "beta") {
    return Density::beta(number(field(j, "a"), "a"), number(field(j, "b"), "b"),
                         number(j, "scale", 1.0));
  }
  if (kind == "constant") return Density::constant(number(j, "value", 1.0));
  if (kind == "tabulated") {
    return Density::tabulated(numbers(field(j, "xs"), "xs"), numbers(field(j, "ys"), "ys"));
  }
  throw ValidationError("unknown density kind '" + kind + "'");
}

}  // namespace

Json to_json(const FiniteMeasure& mu) {
  Json atoms = Json::array();
  for (const Atom& a : mu.atoms()) atoms.push_back({a.x, a.mass});
  Json j{{"atoms", atoms}};
  if (mu.density()) j["density"] = density_to_json(*mu.density());
  return j;
}

FiniteMeasure measure_from_json(const Json& j) {
  return guarded([&] {
    if (!j.is_object()) throw ValidationError("measure must be an object");
    std::vector<Atom> atoms;
    if (j.contains("atoms")) {
      const Json& list = j.at("atoms");
      if (!list.is_array()) throw ValidationError("'atoms' must be an array");
      for (const Json& a : list) {
        if (!a.is_array() || a.size() != 2) {
          throw ValidationError("each atom must be a pair [x, mass]");
        }
        atoms.push_back({number(a[0], "atom x"), number(a[1], "atom mass")});
      }
    }
    std::optional<Density> density;
    if (j.contains("density") && !j.at("density").is_null()) {
      density = density_from_json(j.at("density"));
    }
    return FiniteMeasure(std::move(atoms), std::move(density));
  });
}

Json to_json(const QMatrix& q) { return q.rows(); }

QMatrix qmatrix_from_json(const Json& j) {
  return guarded([&] { return QMatrix(matrix(j, "q")); });
}

Json to_json(const LaplaceExponent& psi) {
  Json jumps = Json::array();
  for (const JumpComponent& c : psi.jumps().components()) {
    jumps.push_back({{"base", to_json(c.base)},
                     {"pow_x", c.pow_x},
                     {"pow_1mx", c.pow_1mx},
                     {"scale", c.scale}});
  }
  return {{"killing", psi.killing()}, {"drift", psi.drift()}, {"jumps", jumps}};
}

LaplaceExponent laplace_exponent_from_json(const Json& j) {
  return guarded([&] {
    if (!j.is_object()) throw ValidationError("Laplace exponent must be an object");
    std::vector<JumpComponent> comps;
    if (j.contains("jumps")) {
      const Json& list = j.at("jumps");
      if (!list.is_array()) throw ValidationError("'jumps' must be an array");
      for (const Json& c : list) {
        comps.push_back({measure_from_json(field(c, "base")), number(c, "pow_x", 0.0),
                         number(c, "pow_1mx", 0.0), number(c, "scale", 1.0)});
      }
    }
    return LaplaceExponent(number(j, "killing", 0.0), number(j, "drift", 0.0),
                           JumpMeasure(std::move(comps)));
  });
}

Json to_json(const MapCharacteristics& chars) {
  Json psi = Json::array();
  for (const LaplaceExponent& p : chars.psi) psi.push_back(to_json(p));
  Json jumps = Json::array();
  for (const auto& row : chars.switch_jumps) {
    Json r = Json::array();
    for (const SwitchLaw& s : row) {
      r.push_back(s.is_zero() ? Json(nullptr) : to_json(s.x_law()));
    }
    jumps.push_back(r);
  }
  return {{"kappa", chars.kappa}, {"psi", psi}, {"lambda", chars.lambda},
          {"switch_jumps", jumps}};
}

MapCharacteristics characteristics_from_json(const Json& j) {
  return guarded([&] {
    MapCharacteristics c;
    const Json& psi = field(j, "psi");
    if (!psi.is_array() || psi.empty()) {
      throw ValidationError("'psi' must be a nonempty array");
    }
    c.kappa = static_cast<int>(psi.size());
    if (j.contains("kappa") && number(j.at("kappa"), "kappa") != c.kappa) {
      throw ValidationError("'kappa' does not match the number of exponents");
    }
    for (const Json& p : psi) c.psi.push_back(laplace_exponent_from_json(p));
    if (j.contains("lambda")) {
      c.lambda = matrix(j.at("lambda"), "lambda");
    } else {
      c.lambda.assign(c.kappa, std::vector<double>(c.kappa, 0.0));
    }
    c.switch_jumps.assign(c.kappa, std::vector<SwitchLaw>(c.kappa));
    if (j.contains("switch_jumps")) {
      const Json& rows = j.at("switch_jumps");
      if (!rows.is_array() || static_cast<int>(rows.size()) != c.kappa) {
        throw ValidationError("'switch_jumps' must be a kappa x kappa array");
      }
      for (int a = 0; a < c.kappa; ++a) {
        if (!rows[a].is_array() || static_cast<int>(rows[a].size()) != c.kappa) {
          throw ValidationError("'switch_jumps' must be a kappa x kappa array");
        }
        for (int b = 0; b < c.kappa; ++b) {
          if (!rows[a][b].is_null()) {
            c.switch_jumps[a][b] = SwitchLaw(measure_from_json(rows[a][b]));
          }
        }
      }
    }
    c.validate();
    return c;
  });
}

Json to_json(const CriticalSpec& spec) {
  Json mu = Json::array();
  for (const auto& row : spec.mu) {
    Json r = Json::array();
    for (const FiniteMeasure& m : row) r.push_back(to_json(m));
    mu.push_back(r);
  }
  return {{"gamma", spec.gamma}, {"mu", mu}};
}

CriticalSpec critical_spec_from_json(const Json& j) {
  return guarded([&] {
    CriticalSpec s;
    s.gamma = number(field(j, "gamma"), "gamma");
    const Json& mu = field(j, "mu");
    if (!mu.is_array()) throw ValidationError("'mu' must be an array of rows");
    for (const Json& row : mu) {
      if (!row.is_array()) throw ValidationError("'mu' must be an array of rows");
      std::vector<FiniteMeasure> r;
      for (const Json& m : row) r.push_back(measure_from_json(m));
      s.mu.push_back(std::move(r));
    }
    s.validate();
    return s;
  });
}

Json to_json(const MixingSpec& spec) {
  Json mu = Json::array();
  for (const FiniteMeasure& m : spec.mu) mu.push_back(to_json(m));
  return {{"gamma", spec.gamma}, {"beta", spec.beta}, {"mu", mu}, {"q", to_json(spec.q)}};
}

MixingSpec mixing_spec_from_json(const Json& j) {
  return guarded([&] {
    MixingSpec s;
    s.gamma = number(field(j, "gamma"), "gamma");
    s.beta = number(field(j, "beta"), "beta");
    const Json& mu = field(j, "mu");
    if (!mu.is_array()) throw ValidationError("'mu' must be an array");
    for (const Json& m : mu) s.mu.push_back(measure_from_json(m));
    s.q = qmatrix_from_json(field(j, "q"));
    s.validate();
    return s;
  });
}

Json to_json(const SoloSpec& spec) {
  return {{"gamma", spec.gamma}, {"type", spec.type}, {"mu", to_json(spec.mu)}};
}

SoloSpec solo_spec_from_json(const Json& j) {
  return guarded([&] {
    SoloSpec s;
    s.gamma = number(field(j, "gamma"), "gamma");
    s.type = static_cast<int>(number(j, "type", 1.0));
    s.mu = measure_from_json(field(j, "mu"));
    s.validate();
    return s;
  });
}

Json to_json(const IncrementLaw& law) {
  switch (law.kind()) {
    case IncrementLaw::Kind::kGeometric:
      return {{"kind", "geometric"}, {"p", law.parameter()}};
    case IncrementLaw::Kind::kPolynomial:
      return {{"kind", "polynomial"}, {"alpha", law.parameter()}};
    case IncrementLaw::Kind::kTable:
      return {{"kind", "table"}, {"probs", law.probs()}};
  }
  return {};
}

IncrementLaw increment_law_from_json(const Json& j) {
  return guarded([&] {
    const std::string kind = text(j, "kind");
    if (kind == "geometric") return IncrementLaw::geometric(number(field(j, "p"), "p"));
    if (kind == "polynomial") {
      return IncrementLaw::polynomial_tail(number(field(j, "alpha"), "alpha"));
    }
    if (kind == "table") return IncrementLaw::table(numbers(field(j, "probs"), "probs"));
    throw ValidationError("unknown increment law kind '" + kind + "'");
  });
}

Json to_json(const BarrierWalkSpec& spec) {
  Json inc = Json::array();
  for (const auto& row : spec.increments) {
    Json r = Json::array();
    for (const IncrementLaw& l : row) r.push_back(to_json(l));
    inc.push_back(r);
  }
  return {{"kind", "barrier"}, {"p", spec.p}, {"increments", inc}};
}

BarrierWalkSpec barrier_spec_from_json(const Json& j) {
  return guarded([&] {
    BarrierWalkSpec s;
    s.p = matrix(field(j, "p"), "p");
    const Json& inc = field(j, "increments");
    if (!inc.is_array()) throw ValidationError("'increments' must be an array of rows");
    for (const Json& row : inc) {
      if (!row.is_array()) throw ValidationError("'increments' must be an array of rows");
      std::vector<IncrementLaw> r;
      for (const Json& l : row) r.push_back(increment_law_from_json(l));
      s.increments.push_back(std::move(r));
    }
    s.validate();
    return s;
  });
}

Json to_json(const TypeMatrixFamily& family) {
  if (family.is_constant()) return {{"kind", "constant"}, {"p", family.at(1)}};
  return {{"kind", "perturbed"},
          {"q", to_json(family.generator())},
          {"beta", family.beta()}};
}

TypeMatrixFamily type_family_from_json(const Json& j) {
  return guarded([&] {
    const std::string kind = text(j, "kind");
    if (kind == "constant") return TypeMatrixFamily::constant(matrix(field(j, "p"), "p"));
    if (kind == "perturbed") {
      return TypeMatrixFamily::perturbed(qmatrix_from_json(field(j, "q")),
                                         number(field(j, "beta"), "beta"));
    }
    throw ValidationError("unknown type family kind '" + kind + "'");
  });
}

std::shared_ptr<TransitionKernel> kernel_from_json(const Json& j) {
  return guarded([&]() -> std::shared_ptr<TransitionKernel> {
    const std::string kind = text(j, "kind");
    if (kind == "barrier") {
      return std::make_shared<BarrierWalkKernel>(barrier_spec_from_json(j));
    }
    if (kind != "product") throw ValidationError("unknown kernel kind '" + kind + "'");
    const Json& laws = field(j, "laws");
    if (!laws.is_array() || laws.empty()) {
      throw ValidationError("'laws' must be a nonempty array");
    }
    std::vector<std::shared_ptr<const PositionLaw>> out;
    for (const Json& l : laws) {
      const std::string lk = text(l, "kind");
      if (lk == "scaled_jump") {
        out.push_back(std::make_shared<ScaledJumpLaw>(
            number(field(l, "ratio"), "ratio"), number(field(l, "rate"), "rate"),
            number(field(l, "exponent"), "exponent")));
      } else if (lk == "coalescent") {
        out.push_back(
            std::make_shared<CoalescentPositionLaw>(measure_from_json(field(l, "lambda"))));
      } else {
        throw ValidationError("unknown position law kind '" + lk + "'");
      }
    }
    return std::make_shared<ProductKernel>(std::move(out),
                                           type_family_from_json(field(j, "types")));
  });
}

Json chain_summary(const ChainRunResult& result) {
  return {{"A", result.absorption_time},
          {"T", result.type_changes},
          {"steps", result.steps},
          {"final",
           {{"position", result.final_state.position}, {"type", result.final_state.type}}}};
}

}  // namespace maplim
