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
#include <stdexcept>
#include <string>

namespace maplim {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: a measure, kernel, path or spec breaking its invariants.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Configuration that cannot be simulated as requested (e.g. a zero small-jump
/// cutoff on an infinite-activity jump measure).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature did not reach the requested tolerance.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double residual)
      : Error(what + " (residual estimate " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Reducible Q-matrix or otherwise disconnected type structure.
class StructuralError : public Error {
 public:
  StructuralError(const std::string& what, int from, int to)
      : Error(what), from_(from), to_(to) {}

  /// A pair (from, to) of 1-based types such that `to` is not reachable from
  /// `from`.
  int from() const noexcept { return from_; }
  int to() const noexcept { return to_; }

 private:
  int from_;
  int to_;
};

/// A simulation exceeded its step or event budget.
class RunawayError : public Error {
 public:
  RunawayError(const std::string& what, std::int64_t position, int type)
      : Error(what), position_(position), type_(type) {}

  std::int64_t position() const noexcept { return position_; }
  int type() const noexcept { return type_; }

 private:
  std::int64_t position_;
  int type_;
};

/// A row or computation exceeded its enumeration budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// A Laplace exponent vanished where a strictly positive value is required.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// A model violates the hypothesis it is supposed to satisfy.
class HypothesisViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace maplim
