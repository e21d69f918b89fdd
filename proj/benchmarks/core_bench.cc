// Copyright 2026 The RDP Noise Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <benchmark/benchmark.h>

#include <vector>

#include "rdpnoise/accountant.h"
#include "rdpnoise/baselines.h"
#include "rdpnoise/optimizer.h"
#include "rdpnoise/rdp_objective.h"

namespace rdpnoise {
namespace {

OptimizationProblem ReferenceProblem(int tail_start, double bin_width) {
  OptimizationProblem p;
  p.sigma = 8.0;
  p.target_delta = 1e-6;
  p.compositions = 10;
  p.bin_width = bin_width;
  p.tail_start = tail_start;
  return p;
}

void BM_ObjectiveMax(benchmark::State& state) {
  const auto problem = ReferenceProblem(static_cast<int>(state.range(0)), 0.01);
  const auto family = InitDistribution(problem);
  const RenyiOrder order(14.0);
  for (auto _ : state) {
    const RenyiObjective objective(
        TailedMasses{family.head(), family.tail_ratio()}, order, 100);
    benchmark::DoNotOptimize(objective.Max());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ObjectiveMax)->Arg(1000)->Arg(2000)->Arg(4000)->Arg(8000)->Complexity();

void BM_DescentStep(benchmark::State& state) {
  const auto problem = ReferenceProblem(static_cast<int>(state.range(0)), 0.01);
  const auto family = InitDistribution(problem);
  const auto constraints = BuildConstraints(problem);
  const SolverSettings settings;
  std::vector<double> p(family.head().begin(), family.head().end());
  for (auto _ : state) {
    benchmark::DoNotOptimize(DescentStep(p, family.tail_ratio(), 100,
                                         RenyiOrder(14.0), constraints,
                                         settings));
  }
}
BENCHMARK(BM_DescentStep)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);

void BM_PldCompose(benchmark::State& state) {
  const auto family =
      EmbedGaussian(8.0, 0.02, 4000, GaussianTailRatio(8.0, 0.02, 4000));
  const auto pld = PldFromFamily(family, 50, 5e-3);
  const int compositions = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(PldSelfCompose(pld, compositions));
  }
}
BENCHMARK(BM_PldCompose)->Arg(1)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_AccountedEpsilon(benchmark::State& state) {
  const auto family = BaselineFamily(Mechanism::kGaussian, 8.0, 0.02, 4000);
  for (auto _ : state) {
    benchmark::DoNotOptimize(AccountedEpsilon(family, 1.0, 10, 1e-6));
  }
}
BENCHMARK(BM_AccountedEpsilon)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace rdpnoise

BENCHMARK_MAIN();
