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

#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "maplim/chain.hpp"
#include "maplim/map.hpp"
#include "maplim/measures.hpp"
#include "maplim/models.hpp"
#include "maplim/rng.hpp"

namespace {

void BM_PhiloxUniform(benchmark::State& state) {
  maplim::Stream rng(1, 0);
  double sum = 0.0;
  for (auto _ : state) sum += rng.uniform();
  benchmark::DoNotOptimize(sum);
}
BENCHMARK(BM_PhiloxUniform);

void BM_JumpSamplerBeta(benchmark::State& state) {
  const maplim::LaplaceExponent psi =
      maplim::laplace_exponent_from_measure(maplim::FiniteMeasure::beta(0.5, 0.5));
  const maplim::MapSimulator sim(maplim::MapCharacteristics::monotype(psi));
  std::uint64_t r = 0;
  for (auto _ : state) {
    maplim::Stream rng(1, r++);
    benchmark::DoNotOptimize(
        sim.simulate(1, maplim::StopRule::horizon(1.0), rng).segments.size());
  }
}
BENCHMARK(BM_JumpSamplerBeta);

void BM_HalvingChain(benchmark::State& state) {
  const auto kernel = std::make_shared<maplim::ProductKernel>(
      std::vector<std::shared_ptr<const maplim::PositionLaw>>{
          std::make_shared<maplim::ScaledJumpLaw>(0.5, 1.0, 1.0)},
      maplim::TypeMatrixFamily::constant({{1.0}}));
  const std::int64_t n = state.range(0);
  std::uint64_t r = 0;
  for (auto _ : state) {
    maplim::Stream rng(1, r++);
    benchmark::DoNotOptimize(maplim::run_chain(*kernel, {n, 1}, rng).absorption_time);
  }
}
BENCHMARK(BM_HalvingChain)->RangeMultiplier(16)->Range(1 << 10, 1 << 22);

void BM_CoalescentRun(benchmark::State& state) {
  maplim::CoalescentEnvSpec spec;
  spec.lambda = {maplim::FiniteMeasure::beta(1.5, 0.5)};
  const auto kernel = maplim::coalescent_kernel(spec);
  const std::int64_t n = state.range(0);
  std::uint64_t r = 0;
  for (auto _ : state) {
    maplim::Stream rng(1, r++);
    benchmark::DoNotOptimize(maplim::count_collisions(*kernel, n, 1, rng).collisions);
  }
}
BENCHMARK(BM_CoalescentRun)->RangeMultiplier(4)->Range(1 << 8, 1 << 14);

void BM_CoalescentRow(benchmark::State& state) {
  const maplim::CoalescentPositionLaw law(maplim::FiniteMeasure::beta(1.5, 0.5));
  const std::int64_t n = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(law.row(n).size());
}
BENCHMARK(BM_CoalescentRow)->RangeMultiplier(8)->Range(1 << 6, 1 << 15);

void BM_BarrierRun(benchmark::State& state) {
  const maplim::BarrierWalkKernel kernel(
      {{{0.7, 0.3}, {0.3, 0.7}},
       {{maplim::IncrementLaw::geometric(0.5), maplim::IncrementLaw::geometric(0.5)},
        {maplim::IncrementLaw::geometric(0.25), maplim::IncrementLaw::geometric(0.25)}}});
  const std::int64_t n = state.range(0);
  std::uint64_t r = 0;
  for (auto _ : state) {
    maplim::Stream rng(1, r++);
    benchmark::DoNotOptimize(maplim::run_chain(kernel, {n, 1}, rng).absorption_time);
  }
}
BENCHMARK(BM_BarrierRun)->RangeMultiplier(16)->Range(1 << 8, 1 << 16);

}  // namespace

BENCHMARK_MAIN();
