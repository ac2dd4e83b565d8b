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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "markov_risk/divergences.hpp"
#include "markov_risk/estimators.hpp"
#include "markov_risk/markov_core.hpp"

namespace mkrisk {

/// prediction: expected loss of the next-state conditional.
/// estimation_max: largest per-state expected row loss.
/// estimation_weighted: per-state expected row losses weighted by pi.
enum class RiskMode { prediction, estimation_max, estimation_weighted };

std::string_view to_string(RiskMode mode);
RiskMode parse_risk_mode(std::string_view token);

struct RiskEstimate {
  double value = 0.0;
  /// Monte Carlo standard error; 0 for exact values, +inf for a single trial.
  double std_error = 0.0;
  std::size_t trials = 0;
  RiskMode mode = RiskMode::prediction;
  bool exact = false;
};

/// Estimation risk together with the per-state expected losses it combines.
struct EstimationRisk {
  RiskEstimate risk;
  std::vector<double> per_state;
  std::vector<double> per_state_error;
};

struct EvalOptions {
  /// Drop the first floor(sqrt(n)) samples before estimating.
  bool burn_in = false;
  std::size_t workers = 1;
};

/// Largest k^n the exact evaluators will enumerate.
inline constexpr std::uint64_t kEnumerationBudget = 10'000'000;

/// Sample mean and standard error (sample sd / sqrt(count)).
struct MeanAndError {
  double mean = 0.0;
  double std_error = 0.0;
};
MeanAndError summarize(std::span<const double> values);

/// Sum over all x^n of Pr(x^n) D(M(x_n, .), predictor(x^n)), in lexicographic
/// order. Throws BudgetError when k^n exceeds kEnumerationBudget.
RiskEstimate exact_prediction_risk(const MarkovChain& chain, const Predictor& predictor,
                                   std::size_t n, const DivergenceSpec& spec);

/// Trial t samples X^n from Rng::substream(seed, t).
RiskEstimate monte_carlo_prediction_risk(const MarkovChain& chain, const Predictor& predictor,
                                         std::size_t n, const DivergenceSpec& spec,
                                         std::size_t trials, std::uint64_t seed,
                                         std::size_t workers = 1);

/// Exact per-state expected losses e_i, combined by max or by the stationary
/// law. mode must not be prediction.
EstimationRisk exact_estimation_risk(const MarkovChain& chain, const MatrixEstimator& estimator,
                                     std::size_t n, const DivergenceSpec& spec, RiskMode mode,
                                     bool burn_in = false);

/// Monte Carlo per-state means. In max mode the reported standard error is
/// that of the argmax state's mean, which understates the uncertainty of a
/// maximum. In weighted mode it is the standard error of the per-trial
/// pi-weighted losses.
EstimationRisk monte_carlo_estimation_risk(const MarkovChain& chain,
                                           const MatrixEstimator& estimator, std::size_t n,
                                           const DivergenceSpec& spec, RiskMode mode,
                                           std::size_t trials, std::uint64_t seed,
                                           const EvalOptions& options = {});

}  // namespace mkrisk
