// Copyright 2026 The metablox Authors
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

#include "metablox/block_state.hpp"
#include "metablox/combinatorics.hpp"
#include "metablox/description_length.hpp"
#include "metablox/inference.hpp"
#include "metablox/significance.hpp"
#include "metablox/synthetic.hpp"

namespace {

using namespace metablox;

SbmSample planted(std::size_t n, std::size_t blocks) {
  SyntheticSpec spec;
  spec.num_nodes = n;
  spec.seed = 3;
  spec.matrices.push_back(theta_bc(spec.target_edges(), 0.1, blocks));
  return sbm_generate(spec);
}

void BM_DescriptionLength(benchmark::State& state) {
  const auto net = planted(static_cast<std::size_t>(state.range(0)), 4);
  const auto v = static_cast<Variant>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(dl(net.graph, net.planted, v).total);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(net.graph.num_edges()));
}
BENCHMARK(BM_DescriptionLength)
    ->ArgsProduct({{200, 1000, 5000}, {0, 1, 2, 3}})
    ->ArgNames({"N", "variant"});

void BM_MoveDelta(benchmark::State& state) {
  const auto net = planted(1000, 4);
  const BlockState st(net.graph, net.planted, static_cast<Variant>(state.range(0)));
  NodeId i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(st.move_delta(i, (st.block_of(i) + 1) % 4));
    i = (i + 1) % 1000;
  }
}
BENCHMARK(BM_MoveDelta)->DenseRange(0, 3)->ArgName("variant");

void BM_McmcSweep(benchmark::State& state) {
  const auto net = planted(static_cast<std::size_t>(state.range(0)), 4);
  BlockState st(net.graph, net.planted, Variant::kDc);
  Rng rng(1);
  const SweepOptions opts;
  for (auto _ : state) benchmark::DoNotOptimize(mcmc_sweep(st, rng, opts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_McmcSweep)->Arg(200)->Arg(1000)->Arg(5000)->ArgName("N");

void BM_Infer(benchmark::State& state) {
  const auto net = planted(static_cast<std::size_t>(state.range(0)), 2);
  InferenceConfig cfg;
  cfg.sweeps = 100;
  cfg.restarts = 1;
  for (auto _ : state) benchmark::DoNotOptimize(infer(net.graph, Variant::kDc, cfg).sigma_opt);
}
BENCHMARK(BM_Infer)->Arg(200)->Arg(1000)->ArgName("N")->Unit(benchmark::kMillisecond);

void BM_LogQ(benchmark::State& state) {
  const auto n = state.range(0);
  for (auto _ : state) {
    QTable qt;
    benchmark::DoNotOptimize(qt.log_q(n, n / 10 + 1));
  }
}
BENCHMARK(BM_LogQ)->Arg(1000)->Arg(5000)->Arg(10000)->ArgName("n")->Unit(benchmark::kMillisecond);

void BM_LogQCached(benchmark::State& state) {
  const QTable& qt = QTable::shared();
  qt.reserve(2000, 200);
  std::int64_t n = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(qt.log_q(n, 1 + n % 200));
    n = n % 2000 + 1;
  }
}
BENCHMARK(BM_LogQCached);

void BM_PermutationEnsemble(benchmark::State& state) {
  const auto net = planted(1000, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        randomized_dl_distribution(net.graph, net.planted, Variant::kDc, 100, 5));
  }
}
BENCHMARK(BM_PermutationEnsemble)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
