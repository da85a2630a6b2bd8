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

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace maplim {

/// Right-continuous step function of (position, type) over [0, inf).
///
/// Segment k holds on [times[k], times[k+1]); the last segment extends to
/// infinity. Type 0 marks the absorbed or killed state.
class SteppedPath {
 public:
  SteppedPath() = default;
  SteppedPath(std::vector<double> times, std::vector<double> positions,
              std::vector<int> types);

  /// Constant path with a single segment.
  static SteppedPath constant(double position, int type);

  /// Appends a breakpoint. A time equal to the last breakpoint overwrites it;
  /// a value equal to the current one is merged away.
  void push(double time, double position, int type);

  std::size_t size() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.empty(); }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<double>& positions() const noexcept { return positions_; }
  const std::vector<int>& types() const noexcept { return types_; }

  /// Index of the segment containing t >= 0.
  std::size_t segment(double t) const;
  double position_at(double t) const { return positions_[segment(t)]; }
  int type_at(double t) const { return types_[segment(t)]; }

  /// Start of the final segment.
  double last_time() const noexcept { return times_.back(); }

  bool non_increasing() const noexcept;

  /// CSV with header `time,position,type`.
  void write_csv(std::ostream& out) const;

 private:
  std::vector<double> times_;
  std::vector<double> positions_;
  std::vector<int> types_;
};

}  // namespace maplim
