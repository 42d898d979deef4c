// Copyright 2026 The GLIMPS Authors.
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

#include "glimps/greedy.h"
#include "glimps/linalg.h"
#include "glimps/lp.h"
#include "glimps/milp.h"
#include "glimps/pipeline.h"
#include "glimps/synth.h"

namespace {

using namespace glimps;

void BM_ProjectionRatio(benchmark::State& state) {
  const Instance inst = generate({static_cast<int>(state.range(0)), 5, 0.3, 0.0, 1});
  for (auto _ : state) benchmark::DoNotOptimize(projection_ratio(inst.u, inst.x));
}
BENCHMARK(BM_ProjectionRatio)->Arg(50)->Arg(100)->Arg(400);

void BM_GreedyErase(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const Instance inst = generate({d, 5, 0.5, 0.0, 2});
  GreedyConfig cfg;
  cfg.removal_fraction = 0.4;
  long calls = 0;
  for (auto _ : state) {
    const GreedyResult res = greedy_erase(inst.u, inst.x, cfg);
    calls = res.trace.projection_calls;
    benchmark::DoNotOptimize(res.survivors.size());
  }
  state.counters["projections"] = static_cast<double>(calls);
}
BENCHMARK(BM_GreedyErase)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_RootRelaxation(benchmark::State& state) {
  const Instance inst = generate({static_cast<int>(state.range(0)), 5, 0.5, 0.0, 3});
  MilpProblem p;
  p.basis = inst.u;
  p.obs = inst.x;
  p.big_m = choose_big_m(inst.u, inst.x, least_squares(inst.u, inst.x), 2.0);
  const lp::LinearProgram prog = big_m_relaxation(p);
  for (auto _ : state) benchmark::DoNotOptimize(lp::solve(prog).objective);
}
BENCHMARK(BM_RootRelaxation)->Arg(30)->Arg(60)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_SolveNoiseless(benchmark::State& state) {
  const double p_out = static_cast<double>(state.range(0)) / 100.0;
  const Instance inst = generate({60, 5, p_out, 0.0, 4});
  MilpProblem p;
  p.basis = inst.u;
  p.obs = inst.x;
  p.big_m = choose_big_m(inst.u, inst.x, least_squares(inst.u, inst.x), 2.0);
  p.time_limit_s = 30.0;
  long nodes = 0;
  for (auto _ : state) {
    const MilpSolution s = solve_noiseless(p);
    nodes = s.nodes_explored;
    benchmark::DoNotOptimize(s.objective);
  }
  state.counters["nodes"] = static_cast<double>(nodes);
}
BENCHMARK(BM_SolveNoiseless)->Arg(20)->Arg(40)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_GlimpsDetect(benchmark::State& state) {
  const double p_out = static_cast<double>(state.range(0)) / 100.0;
  const Instance inst = generate({100, 5, p_out, 0.0, 5});
  GlimpsConfig cfg;
  cfg.time_limit_s = 30.0;
  for (auto _ : state) benchmark::DoNotOptimize(glimps_detect(inst.u, inst.x, cfg).recovered);
}
BENCHMARK(BM_GlimpsDetect)->Arg(30)->Arg(50)->Arg(70)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
