// Copyright 2026 The memconst Authors. All Rights Reserved.
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

#include "memconst/channel_planner.hpp"
#include "memconst/evo_search.hpp"
#include "memconst/memory_model.hpp"
#include "memconst/predictor.hpp"
#include "memconst/search_space.hpp"

namespace {

using namespace memconst;

void BM_ProfileMaximal(benchmark::State& state) {
  const auto space = reference_space();
  const auto config = maximal_config(space);
  for (auto _ : state) {
    benchmark::DoNotOptimize(profile_network(resolve(config, space)).peak_items);
  }
}
BENCHMARK(BM_ProfileMaximal);

void BM_NumericBalance(benchmark::State& state) {
  const StageTemplate cur{56, 7, 4, 4, true};
  const StageTemplate next{28, 7, 4, 4, true};
  const auto blocks = stage_blocks(state.range(0), cur);
  for (auto _ : state) benchmark::DoNotOptimize(numeric_balance(blocks, next));
}
BENCHMARK(BM_NumericBalance)->Arg(8)->Arg(64)->Arg(512);

void BM_PlanSchedule(benchmark::State& state) {
  const ReferenceConfig ref;
  for (auto _ : state) {
    benchmark::DoNotOptimize(plan_schedule(ref, 8, 8, PlanMode::NumericBalance));
  }
}
BENCHMARK(BM_PlanSchedule);

void BM_PredictBatch(benchmark::State& state) {
  const auto space = reference_space();
  Rng rng(1);
  std::vector<SubnetConfig> configs;
  for (int i = 0; i < state.range(0); ++i) configs.push_back(sample_uniform(space, rng));
  PredictorModel model;
  model.weights.assign(feature_length(space), 0.01);
  const LinearPredictor predictor(model, space);
  for (auto _ : state) benchmark::DoNotOptimize(predictor.predict_batch(configs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PredictBatch)->Arg(100)->Arg(1000);

void BM_SearchGeneration(benchmark::State& state) {
  const auto space = reference_space();
  const SyntheticPredictor predictor(space, SyntheticParams{1.0, 0.001, 0.0, 0});
  SearchParams params;
  params.generations = 1;
  for (auto _ : state) {
    params.seed++;
    benchmark::DoNotOptimize(search(space, {350000, true}, predictor, params).best_score);
  }
}
BENCHMARK(BM_SearchGeneration)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
