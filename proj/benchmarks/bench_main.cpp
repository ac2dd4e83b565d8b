// Copyright 2026 The markov-risk Authors
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

#include "markov_risk/divergences.hpp"
#include "markov_risk/estimators.hpp"
#include "markov_risk/markov_core.hpp"
#include "markov_risk/risk_eval.hpp"

using namespace mkrisk;

namespace {

void BM_SampleSequence(benchmark::State& state) {
  const auto chain = random_chain(static_cast<std::size_t>(state.range(0)), 0.01, 1);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_sequence(chain, 100'000, ++seed));
  }
  state.SetItemsProcessed(state.iterations() * 100'000);
}
BENCHMARK(BM_SampleSequence)->Arg(6)->Arg(36);

void BM_CountTransitions(benchmark::State& state) {
  const auto chain = random_chain(6, 0.05, 2);
  const auto x = sample_sequence(chain, 100'000, 3);
  for (auto _ : state) benchmark::DoNotOptimize(count_transitions(x));
  state.SetItemsProcessed(state.iterations() * 100'000);
}
BENCHMARK(BM_CountTransitions);

void BM_Estimators(benchmark::State& state) {
  const std::size_t k = static_cast<std::size_t>(state.range(0));
  const auto counts = count_transitions(sample_sequence(random_chain(k, 0.01, 4), 100'000, 5));
  for (auto _ : state) {
    benchmark::DoNotOptimize(add_beta_matrix(counts, 0.5));
    benchmark::DoNotOptimize(add_sqrt_matrix(counts));
  }
}
BENCHMARK(BM_Estimators)->Arg(6)->Arg(36);

void BM_Divergence(benchmark::State& state) {
  const auto chain = random_chain(36, 0.01, 6);
  const auto spec = builtin(state.range(0) == 0 ? "kl" : "alpha(0.5)");
  const auto& p = chain.matrix().row(0);
  const auto& q = chain.matrix().row(1);
  for (auto _ : state) benchmark::DoNotOptimize(spec.evaluate(p.probs(), q.probs()));
}
BENCHMARK(BM_Divergence)->Arg(0)->Arg(1);

void BM_MonteCarloRisk(benchmark::State& state) {
  const auto chain = random_chain(6, 0.05, 7);
  const auto est = make_matrix_estimator(parse_estimator("add(0.5)"));
  const auto spec = builtin("kl");
  for (auto _ : state) {
    benchmark::DoNotOptimize(monte_carlo_estimation_risk(chain, est, 10'000, spec,
                                                         RiskMode::estimation_max, 20, 8));
  }
}
BENCHMARK(BM_MonteCarloRisk)->Unit(benchmark::kMillisecond);

void BM_ExactPredictionRisk(benchmark::State& state) {
  const auto chain = random_chain(3, 0.05, 9);
  const auto pred = make_predictor(parse_estimator("add(0.5)"));
  const auto spec = builtin("kl");
  for (auto _ : state) benchmark::DoNotOptimize(exact_prediction_risk(chain, pred, 8, spec));
}
BENCHMARK(BM_ExactPredictionRisk)->Unit(benchmark::kMillisecond);

}  // namespace

// The packaged benchmark_main archive is LTO bytecode from another compiler
// release, so the entry point lives here.
BENCHMARK_MAIN();
