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

#include "markov_risk/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "markov_risk/divergences.hpp"
#include "markov_risk/errors.hpp"
#include "markov_risk/estimators.hpp"
#include "markov_risk/markov_core.hpp"
#include "markov_risk/rng.hpp"
#include "markov_risk/theory.hpp"

namespace mkrisk {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ExperimentConfig base_preset(std::string name) {
  ExperimentConfig c;
  c.name = std::move(name);
  c.k_values = {6};
  c.n_min = 10'000;
  c.n_max = 100'000;
  c.n_points = 5;
  c.delta = 0.05;
  c.trials = 100;
  return c;
}

}  // namespace

std::vector<std::string> preset_names() { return {"fig1a", "fig1b", "fig1c", "fig1d"}; }

std::optional<ExperimentConfig> preset(std::string_view name) {
  if (name == "fig1a") {
    auto c = base_preset("fig1a");
    c.divergences = {"kl"};
    c.estimators = {"hybrid", "add(0.5)"};
    c.adjust_prediction_constant = true;
    return c;
  }
  if (name == "fig1b") {
    auto c = base_preset("fig1b");
    c.divergences = {"l2"};
    c.estimators = {"add-sqrt", "add(1)"};
    return c;
  }
  if (name == "fig1c") {
    auto c = base_preset("fig1c");
    c.divergences = {"hellinger", "chi2", "alpha(0.5)"};
    c.estimators = {"add(0.5)"};
    return c;
  }
  if (name == "fig1d") {
    auto c = base_preset("fig1d");
    c.k_values.clear();
    for (std::uint64_t k = 4; k <= 36; k += 4) c.k_values.push_back(k);
    c.n_values = {100'000};
    c.delta = 0.01;
    c.divergences = {"kl"};
    c.estimators = {"add(0.5)"};
    return c;
  }
  return std::nullopt;
}

std::vector<std::uint64_t> n_grid(const ExperimentConfig& config) {
  std::vector<std::uint64_t> grid = config.n_values;
  if (grid.empty()) {
    if (config.n_points == 1) {
      grid.push_back(config.n_min);
    } else if (config.n_points > 1) {
      const double lo = std::log(static_cast<double>(config.n_min));
      const double hi = std::log(static_cast<double>(config.n_max));
      for (std::size_t i = 0; i < config.n_points; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(config.n_points - 1);
        grid.push_back(static_cast<std::uint64_t>(std::llround(std::exp(lo + t * (hi - lo)))));
      }
      // Pin the ends against exp/log round-off.
      grid.front() = config.n_min;
      grid.back() = config.n_max;
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

void validate(const ExperimentConfig& config) {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ValidationError("config field '" + field + "': " + why);
  };
  if (config.name.empty()) fail("name", "must not be empty");
  if (config.k_values.empty()) fail("k", "grid is empty");
  for (auto k : config.k_values) {
    if (k < 2) fail("k", "every k must be at least 2, got " + std::to_string(k));
  }
  if (config.n_values.empty()) {
    if (config.n_points < 1) fail("n_points", "must be at least 1");
    if (config.n_min < 2) fail("n_min", "must be at least 2");
    if (config.n_max < config.n_min) fail("n_max", "must not be below n_min");
  }
  for (auto n : n_grid(config)) {
    if (n < 2) fail("n", "every n must be at least 2, got " + std::to_string(n));
    if (config.burn_in && n < 4) fail("burn_in", "needs n >= 4");
  }
  const auto k_max = *std::max_element(config.k_values.begin(), config.k_values.end());
  if (!(config.delta >= 0.0 && config.delta * static_cast<double>(k_max) < 1.0)) {
    fail("delta", "must lie in [0, 1/k) for every k");
  }
  if (config.divergences.empty()) fail("divergences", "list is empty");
  for (const auto& d : config.divergences) {
    try {
      (void)builtin(d);
    } catch (const ValidationError& e) {
      fail("divergences", e.what());
    }
  }
  if (config.estimators.empty()) fail("estimators", "list is empty");
  for (const auto& e : config.estimators) {
    try {
      (void)parse_estimator(e);
    } catch (const ValidationError& err) {
      fail("estimators", err.what());
    }
  }
  if (config.trials < 1) fail("trials", "must be at least 1");
}

std::uint64_t curve_seed(std::uint64_t master_seed, const std::string& estimator,
                         const std::string& divergence, std::uint64_t k) {
  return derive_seed(master_seed,
                     hash_name(estimator + "|" + divergence + "|" + std::to_string(k)));
}

double theory_value(const DivergenceSpec& spec, RiskMode mode, std::uint64_t k, std::uint64_t n,
                    double min_stationary, bool adjust_prediction_constant) {
  if (n < 3) return kNaN;
  BoundQuery q;
  q.k = k;
  q.n = n;
  q.side = BoundSide::upper;
  if (mode == RiskMode::prediction) {
    if (spec.name() != "kl") return kNaN;
    q.risk = BoundRisk::prediction_kl;
    const double b = bound(q);
    return adjust_prediction_constant ? b / 4.0 : b;
  }
  const bool weighted = mode == RiskMode::estimation_weighted;
  if (spec.is_f_divergence()) {
    q.risk = weighted ? BoundRisk::estimation_f_weighted : BoundRisk::estimation_f;
    q.curvature = *spec.curvature();
  } else if (spec.kind() == LossKind::l2) {
    q.risk = weighted ? BoundRisk::estimation_l2_weighted : BoundRisk::estimation_l2;
  } else {
    return kNaN;
  }
  // pi_star must also respect the class constraint pi* <= 1/k.
  q.pi_star = std::min(min_stationary, 1.0 / static_cast<double>(k));
  return bound(q);
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config, std::size_t workers) {
  validate(config);
  const auto grid = n_grid(config);
  std::vector<ResultRow> rows;
  for (const auto& est_token : config.estimators) {
    const auto est = parse_estimator(est_token);
    const std::string est_name = est.name();
    const RiskMode mode = est.is_predictor_only() ? RiskMode::prediction : config.risk_mode;
    for (const auto& div_token : config.divergences) {
      const auto spec = builtin(div_token);
      for (auto k : config.k_values) {
        const std::uint64_t seed = curve_seed(config.master_seed, est_name, spec.name(), k);
        const auto chain = random_chain(k, config.delta, seed);
        const double pi_min = stationary_distribution(chain.matrix()).min();
        for (auto n : grid) {
          const std::uint64_t trial_seed = derive_seed(seed, n);
          RiskEstimate r;
          if (mode == RiskMode::prediction) {
            r = monte_carlo_prediction_risk(chain, make_predictor(est), n, spec, config.trials,
                                            trial_seed, workers);
          } else {
            r = monte_carlo_estimation_risk(chain, make_matrix_estimator(est), n, spec, mode,
                                            config.trials, trial_seed,
                                            EvalOptions{config.burn_in, workers})
                    .risk;
          }
          ResultRow row;
          row.experiment = config.name;
          row.k = k;
          row.n = n;
          row.delta = config.delta;
          row.divergence = spec.name();
          row.estimator = est_name;
          row.risk_mode = mode;
          row.trials = config.trials;
          row.mean_loss = r.value;
          row.std_error = r.std_error;
          row.theory_value =
              theory_value(spec, mode, k, n, pi_min, config.adjust_prediction_constant);
          row.master_seed = config.master_seed;
          rows.push_back(std::move(row));
        }
      }
    }
  }
  return rows;
}

}  // namespace mkrisk
