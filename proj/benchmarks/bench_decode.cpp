// Copyright 2026 The treedec Authors
// SPDX-License-Identifier: Apache-2.0
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

// Microbenchmarks: one forward pass of n branch rows against a shared
// prefix, tree-mask construction, and whole-task decoding in both modes.

#include <benchmark/benchmark.h>

#include <random>

#include "treedec/harness/bench.hpp"
#include "treedec/harness/tasks.hpp"
#include "treedec/layout/tree_mask.hpp"
#include "treedec/model/transformer.hpp"
#include "treedec/oracle/mask_oracle.hpp"

namespace {

using namespace treedec;

constexpr std::size_t kPrefix = 256;

// One decode pass of n rows at a shared position, each seeing the prefix
// and itself. n = 1 is a plain causal step.
void BM_ForwardBranches(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto model = init_model(ModelConfig{});
  KVCache cache = model->make_cache();
  ForwardRequest prefill;
  for (std::size_t i = 0; i < kPrefix; ++i) {
    prefill.token_ids.push_back(static_cast<TokenId>('a' + i % 26));
    prefill.position_ids.push_back(static_cast<PositionId>(i));
  }
  prefill.mask_rows = causal_rows(0, kPrefix);
  model->forward(prefill, cache);

  ForwardRequest step;
  for (std::size_t b = 0; b < n; ++b) {
    step.token_ids.push_back(static_cast<TokenId>('A' + b % 26));
    step.position_ids.push_back(static_cast<PositionId>(kPrefix));
    auto row = causal_rows(0, kPrefix).back();
    row.push_back(kPrefix + b);
    step.mask_rows.push_back(std::move(row));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(model->forward(step, cache));
    cache.truncate(kPrefix);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_ForwardBranches)->Arg(1)->Arg(2)->Arg(4)->Arg(10)->Arg(16);

void BM_TreeMask(benchmark::State& state) {
  std::mt19937_64 rng(11);
  oracle::LayoutLimits limits;
  limits.max_prefix = 64;
  limits.max_branches = static_cast<std::size_t>(state.range(0));
  limits.max_steps = 24;
  std::vector<SequenceLayout> layouts;
  for (int i = 0; i < 32; ++i) layouts.push_back(oracle::random_layout(rng, limits));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(tree_mask(layouts[i++ % layouts.size()]));
}
BENCHMARK(BM_TreeMask)->Arg(2)->Arg(10)->Arg(16);

// Whole retrieval task (n branches, 20-token bodies) on the scripted engine;
// reports the tokens-per-pass ratio as a counter.
void BM_RetrievalTask(benchmark::State& state) {
  const auto mode = state.range(0) == 0 ? DecodeMode::kNormal : DecodeMode::kParallel;
  const auto task = gen_retrieval_task(static_cast<std::size_t>(state.range(1)), 42, RetrievalOptions{20, 20});
  ModeResult last;
  for (auto _ : state) last = run_task_mode(task, mode, DecodeConfig{});
  state.counters["tokens_per_pass"] = last.tokens_per_pass;
  state.counters["forward_passes"] = static_cast<double>(last.forward_passes);
  state.SetLabel(std::string(mode_name(mode)));
}
BENCHMARK(BM_RetrievalTask)->ArgsProduct({{0, 1}, {2, 10}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
