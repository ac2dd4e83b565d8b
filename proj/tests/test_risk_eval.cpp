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

#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <vector>

#include "markov_risk/divergences.hpp"
#include "markov_risk/errors.hpp"
#include "markov_risk/estimators.hpp"
#include "markov_risk/markov_core.hpp"
#include "markov_risk/risk_eval.hpp"
#include "test_support.hpp"

using namespace mkrisk;

namespace {

MarkovChain fair_coin() {
  return MarkovChain(Distribution::uniform(2), TransitionMatrix::uniform(2));
}

Predictor constant_predictor(Distribution d) {
  return [d](const SampleSequence&) { return d; };
}

MatrixEstimator truth(const MarkovChain& chain) {
  return [m = chain.matrix()](const SampleSequence&) { return m; };
}

}  // namespace

TEST(ExactPrediction, PerfectPredictorHasZeroRisk) {
  const auto r = exact_prediction_risk(fair_coin(), constant_predictor(Distribution::uniform(2)), 5,
                                       DivergenceSpec::kl());
  EXPECT_EQ(r.value, 0.0);
  EXPECT_TRUE(r.exact);
  EXPECT_EQ(r.std_error, 0.0);
  EXPECT_EQ(r.trials, 0u);
}

TEST(ExactPrediction, ConstantPredictorHandValue) {
  const auto r = exact_prediction_risk(fair_coin(), constant_predictor(Distribution{0.9, 0.1}), 4,
                                       DivergenceSpec::kl());
  // 0.5 ln(0.5/0.9) + 0.5 ln(0.5/0.1)
  EXPECT_NEAR(r.value, 0.5 * std::log(0.5 / 0.9) + 0.5 * std::log(5.0), 1e-14);
  EXPECT_NEAR(r.value, 0.51083, 1e-5);
}

TEST(ExactPrediction, MatchesIndependentEnumeration) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto chain = random_chain(3, 0.02, seed);
    const auto predictor = make_predictor(parse_estimator("add(0.5)"));
    double oracle = 0.0;
    for (const auto& x : oracle::all_sequences(3, 5)) {
      const SampleSequence s(x, 3);
      oracle += oracle::sequence_probability(chain, x) *
                oracle::kl_direct(chain.matrix().row(x.back()).values(), predictor(s).values());
    }
    EXPECT_NEAR(exact_prediction_risk(chain, predictor, 5, DivergenceSpec::kl()).value, oracle,
                1e-13);
  }
}

TEST(ExactPrediction, BudgetExceeded) {
  EXPECT_THROW(exact_prediction_risk(fair_coin(), constant_predictor(Distribution::uniform(2)), 30,
                                     DivergenceSpec::kl()),
               BudgetError);
}

TEST(MonteCarloPrediction, AbsorbingChainWithTrueRow) {
  const MarkovChain chain(Distribution::point_mass(2, 0), TransitionMatrix::identity(2));
  const auto r = monte_carlo_prediction_risk(chain, constant_predictor(Distribution{1.0, 0.0}), 10,
                                             DivergenceSpec::kl(), 50, 1);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_FALSE(r.exact);
  EXPECT_EQ(r.trials, 50u);
}

TEST(MonteCarloPrediction, AgreesWithExactOnFuzzedCases) {
  const char* estimators[] = {"add(0.5)", "add(1)", "hybrid"};
  const char* losses[] = {"kl", "chi2", "hellinger"};
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto chain = random_chain(2, 0.05, 1000 + seed);
    for (const char* e : estimators) {
      for (const char* d : losses) {
        const auto predictor = make_predictor(parse_estimator(e));
        const auto spec = builtin(d);
        const auto exact = exact_prediction_risk(chain, predictor, 6, spec);
        const auto mc = monte_carlo_prediction_risk(chain, predictor, 6, spec, 4000, seed);
        EXPECT_LE(std::abs(exact.value - mc.value), 3.0 * mc.std_error + 1e-15)
            << "seed " << seed << ' ' << e << ' ' << d;
        ++checked;
      }
    }
  }
  EXPECT_EQ(checked, 180);
}

TEST(MonteCarloPrediction, StdErrorScalesWithTrials) {
  const auto chain = random_chain(3, 0.05, 4);
  const auto predictor = make_predictor(parse_estimator("add(0.5)"));
  const auto a = monte_carlo_prediction_risk(chain, predictor, 50, DivergenceSpec::kl(), 4000, 9);
  const auto b = monte_carlo_prediction_risk(chain, predictor, 50, DivergenceSpec::kl(), 8000, 9);
  EXPECT_NEAR(a.std_error / b.std_error, std::sqrt(2.0), 0.2 * std::sqrt(2.0));
}

TEST(MonteCarloPrediction, WorkerCountDoesNotChangeResult) {
  const auto chain = random_chain(4, 0.05, 5);
  const auto predictor = make_predictor(parse_estimator("hybrid"));
  const auto a = monte_carlo_prediction_risk(chain, predictor, 200, DivergenceSpec::kl(), 300, 2, 1);
  const auto b = monte_carlo_prediction_risk(chain, predictor, 200, DivergenceSpec::kl(), 300, 2, 8);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.std_error, b.std_error);
}

TEST(MonteCarloPrediction, SingleTrialHasInfiniteStdError) {
  const auto r = monte_carlo_prediction_risk(fair_coin(), constant_predictor(Distribution{0.9, 0.1}),
                                             5, DivergenceSpec::kl(), 1, 3);
  EXPECT_TRUE(std::isinf(r.std_error));
  EXPECT_THROW(monte_carlo_prediction_risk(fair_coin(), constant_predictor(Distribution{0.9, 0.1}),
                                           5, DivergenceSpec::kl(), 0, 3),
               ValidationError);
}

TEST(MonteCarloPrediction, HybridRiskIsFinite) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto chain = random_chain(3, 0.0, seed);
    const auto r = monte_carlo_prediction_risk(chain, make_predictor(parse_estimator("hybrid")), 40,
                                               DivergenceSpec::kl(), 200, seed);
    EXPECT_TRUE(std::isfinite(r.value));
  }
}

TEST(ExactEstimation, TrueMatrixHasZeroRisk) {
  const auto chain = random_chain(3, 0.05, 2);
  for (auto mode : {RiskMode::estimation_max, RiskMode::estimation_weighted}) {
    for (const auto& spec : {DivergenceSpec::kl(), DivergenceSpec::l2()}) {
      EXPECT_EQ(exact_estimation_risk(chain, truth(chain), 5, spec, mode).risk.value, 0.0);
      EXPECT_EQ(monte_carlo_estimation_risk(chain, truth(chain), 50, spec, mode, 10, 1).risk.value,
                0.0);
    }
  }
}

TEST(ExactEstimation, MaxDominatesWeighted) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto chain = random_chain(3, 0.05, seed);
    const auto est = make_matrix_estimator(parse_estimator("add(0.5)"));
    const auto mx = exact_estimation_risk(chain, est, 6, DivergenceSpec::kl(), RiskMode::estimation_max);
    const auto wt =
        exact_estimation_risk(chain, est, 6, DivergenceSpec::kl(), RiskMode::estimation_weighted);
    EXPECT_GE(mx.risk.value, wt.risk.value);
    EXPECT_EQ(mx.per_state, wt.per_state);
  }
}

TEST(ExactEstimation, MatchesIndependentEnumeration) {
  const auto chain = random_chain(2, 0.05, 42);
  const auto est = make_matrix_estimator(parse_estimator("add-sqrt"));
  std::vector<double> e(2, 0.0);
  for (const auto& x : oracle::all_sequences(2, 7)) {
    const auto m = est(SampleSequence(x, 2));
    const double p = oracle::sequence_probability(chain, x);
    for (State i = 0; i < 2; ++i) {
      e[i] += p * oracle::kl_direct(chain.matrix().row(i).values(), m.row(i).values());
    }
  }
  const auto r = exact_estimation_risk(chain, est, 7, DivergenceSpec::kl(), RiskMode::estimation_max);
  EXPECT_NEAR(r.per_state[0], e[0], 1e-14);
  EXPECT_NEAR(r.per_state[1], e[1], 1e-14);
  EXPECT_EQ(r.risk.value, std::max(r.per_state[0], r.per_state[1]));
  const auto pi = oracle::solve_stationary(chain.matrix());
  const auto w =
      exact_estimation_risk(chain, est, 7, DivergenceSpec::kl(), RiskMode::estimation_weighted);
  EXPECT_NEAR(w.risk.value, pi[0] * e[0] + pi[1] * e[1], 1e-14);
}

TEST(ExactEstimation, RejectsPredictionMode) {
  const auto chain = random_chain(2, 0.05, 1);
  EXPECT_THROW(exact_estimation_risk(chain, truth(chain), 4, DivergenceSpec::kl(),
                                     RiskMode::prediction),
               ValidationError);
}

TEST(MonteCarloEstimation, AgreesWithExactOnFuzzedCases) {
  const char* estimators[] = {"add(0.5)", "add(1)", "add-sqrt"};
  const char* losses[] = {"kl", "hellinger", "l2"};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto chain = random_chain(2, 0.05, 2000 + seed);
    for (const char* e : estimators) {
      for (const char* d : losses) {
        const auto est = make_matrix_estimator(parse_estimator(e));
        const auto spec = builtin(d);
        for (auto mode : {RiskMode::estimation_max, RiskMode::estimation_weighted}) {
          const auto exact = exact_estimation_risk(chain, est, 6, spec, mode);
          const auto mc = monte_carlo_estimation_risk(chain, est, 6, spec, mode, 4000, seed);
          // Compare per state. About 120 independent sample sets are checked
          // here, so 3 sigma would trip by chance; 4 sigma keeps that near 1%.
          for (State i = 0; i < 2; ++i) {
            EXPECT_LE(std::abs(exact.per_state[i] - mc.per_state[i]),
                      4.0 * mc.per_state_error[i] + 1e-15)
                << "seed " << seed << ' ' << e << ' ' << d << " state " << i;
          }
        }
      }
    }
  }
}

TEST(MonteCarloEstimation, BurnInShortensTheEvaluatedSequence) {
  const auto chain = random_chain(3, 0.05, 6);
  std::atomic<std::size_t> seen{0};
  MatrixEstimator spy = [&](const SampleSequence& x) {
    seen = x.size();
    return add_beta_matrix(count_transitions(x), 0.5);
  };
  (void)monte_carlo_estimation_risk(chain, spy, 10'000, DivergenceSpec::kl(),
                                    RiskMode::estimation_max, 2, 1, EvalOptions{true, 1});
  EXPECT_EQ(seen.load(), 9900u);
  (void)monte_carlo_estimation_risk(chain, spy, 10'000, DivergenceSpec::kl(),
                                    RiskMode::estimation_max, 2, 1, EvalOptions{false, 1});
  EXPECT_EQ(seen.load(), 10'000u);
}

TEST(MonteCarloEstimation, ExperimentScaleHasSmallRelativeError) {
  const auto chain = random_chain(6, 0.05, 2019);
  const auto r = monte_carlo_estimation_risk(chain, make_matrix_estimator(parse_estimator("add(0.5)")),
                                             100'000, DivergenceSpec::kl(), RiskMode::estimation_max,
                                             100, 7, EvalOptions{false, 4});
  EXPECT_TRUE(std::isfinite(r.risk.value));
  EXPECT_LT(r.risk.std_error / r.risk.value, 0.2);
}

TEST(MonteCarloEstimation, WorkerCountDoesNotChangeResult) {
  const auto chain = random_chain(4, 0.05, 8);
  const auto est = make_matrix_estimator(parse_estimator("add-sqrt"));
  const auto a = monte_carlo_estimation_risk(chain, est, 500, DivergenceSpec::l2(),
                                             RiskMode::estimation_weighted, 64, 3, {false, 1});
  const auto b = monte_carlo_estimation_risk(chain, est, 500, DivergenceSpec::l2(),
                                             RiskMode::estimation_weighted, 64, 3, {false, 8});
  EXPECT_EQ(a.risk.value, b.risk.value);
  EXPECT_EQ(a.per_state, b.per_state);
}

TEST(Summarize, MeanAndStandardError) {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto s = summarize(v);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  // Sample sd sqrt(5/3), over sqrt(4).
  EXPECT_NEAR(s.std_error, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
}

TEST(RiskMode, Tokens) {
  EXPECT_EQ(parse_risk_mode("max"), RiskMode::estimation_max);
  EXPECT_EQ(parse_risk_mode("estimation_weighted"), RiskMode::estimation_weighted);
  EXPECT_EQ(to_string(RiskMode::prediction), "prediction");
  EXPECT_THROW(parse_risk_mode("mean"), ValidationError);
}
