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

#include <memory>

#include <nlohmann/json.hpp>

#include "maplim/chain.hpp"
#include "maplim/map.hpp"
#include "maplim/measures.hpp"
#include "maplim/models.hpp"
#include "maplim/regimes.hpp"

namespace maplim {

using Json = nlohmann::json;

// Every *_from_json function throws ValidationError on schema violations,
// naming the offending field.

/// {"atoms": [[x, mass], ...], "density": {...}}, density kinds "beta"
/// {a, b, scale}, "constant" {value} and "tabulated" {xs, ys}.
Json to_json(const FiniteMeasure& mu);
FiniteMeasure measure_from_json(const Json& j);

Json to_json(const QMatrix& q);
QMatrix qmatrix_from_json(const Json& j);

/// {"killing", "drift", "jumps": [{"base", "pow_x", "pow_1mx", "scale"}]}.
Json to_json(const LaplaceExponent& psi);
LaplaceExponent laplace_exponent_from_json(const Json& j);

/// {"kappa", "psi": [...], "lambda": [[...]], "switch_jumps": [[measure or null]]}
/// where switch jump laws are given as laws of x = e^{-B}.
Json to_json(const MapCharacteristics& chars);
MapCharacteristics characteristics_from_json(const Json& j);

Json to_json(const CriticalSpec& spec);
CriticalSpec critical_spec_from_json(const Json& j);
Json to_json(const MixingSpec& spec);
MixingSpec mixing_spec_from_json(const Json& j);
Json to_json(const SoloSpec& spec);
SoloSpec solo_spec_from_json(const Json& j);

/// {"kind": "geometric", "p"} | {"kind": "polynomial", "alpha"} |
/// {"kind": "table", "probs"}.
Json to_json(const IncrementLaw& law);
IncrementLaw increment_law_from_json(const Json& j);

Json to_json(const BarrierWalkSpec& spec);
BarrierWalkSpec barrier_spec_from_json(const Json& j);

/// {"kind": "constant", "p"} | {"kind": "perturbed", "q", "beta"}.
Json to_json(const TypeMatrixFamily& family);
TypeMatrixFamily type_family_from_json(const Json& j);

/// Kernel specs: {"kind": "product", "laws": [...], "types": {...}} with laws
/// {"kind": "scaled_jump", "ratio", "rate", "exponent"} or
/// {"kind": "coalescent", "lambda": measure}; or {"kind": "barrier", ...}.
std::shared_ptr<TransitionKernel> kernel_from_json(const Json& j);

/// {"A", "T": [type change steps], "steps", "final": {"position", "type"}}.
Json chain_summary(const ChainRunResult& result);

}  // namespace maplim
