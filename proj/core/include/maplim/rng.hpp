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

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>

namespace maplim {

/// Philox4x32-10 block function: a keyed bijection on 128-bit counters.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter apply(Counter ctr, Key key) noexcept {
    ctr = round(ctr, key);
    for (int r = 1; r < 10; ++r) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
      ctr = round(ctr, key);
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static Counter round(const Counter& c, const Key& k) noexcept {
    const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

/// A reproducible random stream addressed by (seed, replicate, substream).
///
/// Draws are a pure function of the address and the number of values consumed,
/// so replicates can be simulated in any order or on any thread and still
/// reproduce bit-identical results. Each stream owns 2^32 Philox blocks
/// (2^33 64-bit words).
class Stream {
 public:
  using result_type = std::uint64_t;

  Stream(std::uint64_t seed, std::uint64_t replicate,
         std::uint32_t substream = 0) noexcept
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        replicate_(replicate),
        substream_(substream) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept { return next_u64(); }

  std::uint64_t next_u64() noexcept {
    if (cursor_ == 2) refill();
    const std::uint64_t v =
        (std::uint64_t{buffer_[2 * cursor_ + 1]} << 32) | buffer_[2 * cursor_];
    ++cursor_;
    return v;
  }

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Exponential variate with the given rate (rate > 0).
  double exponential(double rate) noexcept;

  double normal() noexcept;

  /// Gamma(shape, 1) returned as its logarithm, which stays finite for shapes
  /// far below one.
  double log_gamma_variate(double shape) noexcept;

  /// Beta(a, b) variate returned as the pair (x, 1 - x), both computed
  /// without cancellation.
  std::pair<double, double> beta(double a, double b) noexcept;

  /// Number of failures before the first success of Bernoulli(success) trials.
  std::uint64_t geometric_failures(double success) noexcept;

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Index drawn proportionally to `weights` (nonnegative, not all zero).
  std::size_t categorical(std::span<const double> weights) noexcept;

  std::uint64_t blocks_consumed() const noexcept { return block_; }

 private:
  void refill() noexcept {
    buffer_ = Philox4x32::apply(
        {block_, substream_, static_cast<std::uint32_t>(replicate_),
         static_cast<std::uint32_t>(replicate_ >> 32)},
        key_);
    ++block_;
    cursor_ = 0;
  }

  Philox4x32::Key key_;
  std::uint64_t replicate_;
  std::uint32_t substream_;
  std::uint32_t block_ = 0;
  Philox4x32::Counter buffer_{};
  int cursor_ = 2;
};

}  // namespace maplim
