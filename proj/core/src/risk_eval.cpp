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

#include "markov_risk/risk_eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "markov_risk/errors.hpp"
#include "markov_risk/parallel.hpp"

namespace mkrisk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_budget(std::size_t k, std::size_t n) {
  std::uint64_t total = 1;
  for (std::size_t t = 0; t < n; ++t) {
    total *= k;
    if (total > kEnumerationBudget) {
      throw BudgetError("exact enumeration of " + std::to_string(k) + "^" + std::to_string(n) +
                        " sequences exceeds the budget of " +
                        std::to_string(kEnumerationBudget));
    }
  }
}

// Visits every x^n in lexicographic order with its probability under the chain.
template <class Visit>
void for_each_sequence(const MarkovChain& chain, std::size_t n, Visit&& visit) {
  const std::size_t k = chain.size();
  check_budget(k, n);
  std::vector<State> x(n, 0);
  std::vector<double> prefix(n);
  auto refresh = [&](std::size_t from) {
    for (std::size_t t = from; t < n; ++t) {
      prefix[t] = t == 0 ? chain.initial()[x[0]] : prefix[t - 1] * chain.matrix()(x[t - 1], x[t]);
    }
  };
  refresh(0);
  while (true) {
    visit(x, prefix[n - 1]);
    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      if (++x[pos] < k) break;
      x[pos] = 0;
      if (pos == 0) return;
    }
    refresh(pos);
  }
}

void check_trials(std::size_t trials) {
  if (trials < 1) throw ValidationError("Monte Carlo risk needs at least one trial");
}

std::vector<double> row_losses(const MarkovChain& chain, const TransitionMatrix& estimate,
                               const DivergenceSpec& spec) {
  const std::size_t k = chain.size();
  if (estimate.size() != k) throw ValidationError("estimator returned a matrix of the wrong size");
  std::vector<double> losses(k);
  for (State i = 0; i < k; ++i) {
    losses[i] = spec.evaluate(chain.matrix().row(i).probs(), estimate.row(i).probs());
  }
  return losses;
}

std::vector<double> stationary_weights(const MarkovChain& chain, RiskMode mode) {
  if (mode == RiskMode::prediction) {
    throw ValidationError("estimation risk needs an estimation mode, not prediction");
  }
  if (mode == RiskMode::estimation_weighted) {
    return stationary_distribution(chain.matrix()).values();
  }
  return {};
}

}  // namespace

std::string_view to_string(RiskMode mode) {
  switch (mode) {
    case RiskMode::prediction:
      return "prediction";
    case RiskMode::estimation_max:
      return "estimation_max";
    case RiskMode::estimation_weighted:
      return "estimation_weighted";
  }
  return "?";
}

RiskMode parse_risk_mode(std::string_view token) {
  if (token == "prediction") return RiskMode::prediction;
  if (token == "estimation_max" || token == "max") return RiskMode::estimation_max;
  if (token == "estimation_weighted" || token == "weighted") return RiskMode::estimation_weighted;
  throw ValidationError("unknown risk mode '" + std::string(token) +
                        "' (expected prediction, estimation_max, estimation_weighted)");
}

MeanAndError summarize(std::span<const double> values) {
  MeanAndError out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  const auto count = static_cast<double>(values.size());
  out.mean = sum / count;
  if (!std::isfinite(out.mean) || values.size() < 2) {
    out.std_error = kInf;
    return out;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.std_error = std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
  return out;
}

RiskEstimate exact_prediction_risk(const MarkovChain& chain, const Predictor& predictor,
                                   std::size_t n, const DivergenceSpec& spec) {
  if (n < 1) throw ValidationError("prediction risk needs n >= 1");
  const std::size_t k = chain.size();
  double total = 0.0;
  for_each_sequence(chain, n, [&](const std::vector<State>& x, double prob) {
    if (prob == 0.0) return;
    const SampleSequence seq(x, k);
    const auto predicted = predictor(seq);
    total += prob * spec.evaluate(chain.matrix().row(seq.back()).probs(), predicted.probs());
  });
  return RiskEstimate{total, 0.0, 0, RiskMode::prediction, true};
}

RiskEstimate monte_carlo_prediction_risk(const MarkovChain& chain, const Predictor& predictor,
                                         std::size_t n, const DivergenceSpec& spec,
                                         std::size_t trials, std::uint64_t seed,
                                         std::size_t workers) {
  check_trials(trials);
  std::vector<double> losses(trials);
  parallel_for(trials, workers, [&](std::size_t t) {
    Rng rng = Rng::substream(seed, t);
    const auto x = sample_sequence(chain, n, rng);
    losses[t] = spec.evaluate(chain.matrix().row(x.back()).probs(), predictor(x).probs());
  });
  const auto s = summarize(losses);
  return RiskEstimate{s.mean, s.std_error, trials, RiskMode::prediction, false};
}

EstimationRisk exact_estimation_risk(const MarkovChain& chain, const MatrixEstimator& estimator,
                                     std::size_t n, const DivergenceSpec& spec, RiskMode mode,
                                     bool burn_in) {
  const auto weights = stationary_weights(chain, mode);
  const std::size_t k = chain.size();
  std::vector<double> per_state(k, 0.0);
  for_each_sequence(chain, n, [&](const std::vector<State>& x, double prob) {
    if (prob == 0.0) return;
    SampleSequence seq(x, k);
    if (burn_in) seq = mkrisk::burn_in(seq);
    const auto losses = row_losses(chain, estimator(seq), spec);
    for (State i = 0; i < k; ++i) per_state[i] += prob * losses[i];
  });

  EstimationRisk out;
  out.per_state = per_state;
  out.per_state_error.assign(k, 0.0);
  out.risk.mode = mode;
  out.risk.exact = true;
  if (mode == RiskMode::estimation_max) {
    out.risk.value = *std::max_element(per_state.begin(), per_state.end());
  } else {
    double v = 0.0;
    for (State i = 0; i < k; ++i) v += weights[i] * per_state[i];
    out.risk.value = v;
  }
  return out;
}

EstimationRisk monte_carlo_estimation_risk(const MarkovChain& chain,
                                           const MatrixEstimator& estimator, std::size_t n,
                                           const DivergenceSpec& spec, RiskMode mode,
                                           std::size_t trials, std::uint64_t seed,
                                           const EvalOptions& options) {
  check_trials(trials);
  const auto weights = stationary_weights(chain, mode);
  const std::size_t k = chain.size();
  std::vector<std::vector<double>> losses(trials);
  parallel_for(trials, options.workers, [&](std::size_t t) {
    Rng rng = Rng::substream(seed, t);
    auto x = sample_sequence(chain, n, rng);
    if (options.burn_in) x = burn_in(x);
    losses[t] = row_losses(chain, estimator(x), spec);
  });

  EstimationRisk out;
  out.per_state.resize(k);
  out.per_state_error.resize(k);
  std::vector<double> column(trials);
  for (State i = 0; i < k; ++i) {
    for (std::size_t t = 0; t < trials; ++t) column[t] = losses[t][i];
    const auto s = summarize(column);
    out.per_state[i] = s.mean;
    out.per_state_error[i] = s.std_error;
  }
  out.risk.mode = mode;
  out.risk.trials = trials;
  if (mode == RiskMode::estimation_max) {
    const auto worst = static_cast<std::size_t>(
        std::max_element(out.per_state.begin(), out.per_state.end()) - out.per_state.begin());
    out.risk.value = out.per_state[worst];
    out.risk.std_error = out.per_state_error[worst];
  } else {
    for (std::size_t t = 0; t < trials; ++t) {
      double w = 0.0;
      for (State i = 0; i < k; ++i) w += weights[i] * losses[t][i];
      column[t] = w;
    }
    const auto s = summarize(column);
    out.risk.value = s.mean;
    out.risk.std_error = s.std_error;
  }
  return out;
}

}  // namespace mkrisk
