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

#include "maplim/path.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "maplim/error.hpp"

namespace maplim {

SteppedPath::SteppedPath(std::vector<double> times, std::vector<double> positions,
                         std::vector<int> types)
    : times_(std::move(times)),
      positions_(std::move(positions)),
      types_(std::move(types)) {
  if (times_.empty() || times_.size() != positions_.size() ||
      times_.size() != types_.size()) {
    throw ValidationError("path needs equally sized, nonempty columns");
  }
  if (times_.front() != 0.0) throw ValidationError("path must start at time 0");
  for (std::size_t k = 1; k < times_.size(); ++k) {
    if (!(times_[k] > times_[k - 1])) {
      throw ValidationError("path times must be strictly increasing");
    }
  }
  for (std::size_t k = 0; k < times_.size(); ++k) {
    if (!(positions_[k] >= 0.0)) throw ValidationError("path positions must be >= 0");
    if (types_[k] < 0) throw ValidationError("path types must be >= 0");
  }
}

SteppedPath SteppedPath::constant(double position, int type) {
  return SteppedPath({0.0}, {position}, {type});
}

void SteppedPath::push(double time, double position, int type) {
  if (times_.empty()) {
    if (time != 0.0) throw ValidationError("path must start at time 0");
  } else if (time < times_.back()) {
    throw ValidationError("path times must be increasing");
  } else if (time == times_.back()) {
    positions_.back() = position;
    types_.back() = type;
    if (times_.size() >= 2 && positions_[times_.size() - 2] == position &&
        types_[times_.size() - 2] == type) {
      times_.pop_back();
      positions_.pop_back();
      types_.pop_back();
    }
    return;
  } else if (positions_.back() == position && types_.back() == type) {
    return;
  }
  times_.push_back(time);
  positions_.push_back(position);
  types_.push_back(type);
}

std::size_t SteppedPath::segment(double t) const {
  if (times_.empty()) throw ValidationError("empty path");
  if (!(t >= 0.0)) throw ValidationError("path evaluated at negative time");
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  return static_cast<std::size_t>(it - times_.begin()) - 1;
}

bool SteppedPath::non_increasing() const noexcept {
  for (std::size_t k = 1; k < positions_.size(); ++k) {
    if (positions_[k] > positions_[k - 1]) return false;
  }
  return true;
}

void SteppedPath::write_csv(std::ostream& out) const {
  const auto old = out.precision(17);
  out << "time,position,type\n";
  for (std::size_t k = 0; k < times_.size(); ++k) {
    out << times_[k] << ',' << positions_[k] << ',' << types_[k] << '\n';
  }
  out.precision(old);
}

}  // namespace maplim
