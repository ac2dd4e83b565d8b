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
#include <optional>
#include <string>
#include <vector>

#include "markov_risk/risk_eval.hpp"

namespace mkrisk {

/// A sweep over k and n for a set of estimators and losses. Each
/// (estimator, loss, k) curve gets its own random chain; every grid point
/// averages `trials` independent restarts of that chain.
struct ExperimentConfig {
  std::string name = "custom";
  std::vector<std::uint64_t> k_values{6};
  /// Explicit n grid. When empty, n_min..n_max with n_points geometric steps.
  std::vector<std::uint64_t> n_values;
  std::uint64_t n_min = 10'000;
  std::uint64_t n_max = 100'000;
  std::size_t n_points = 5;
  double delta = 0.05;
  std::vector<std::string> divergences{"kl"};
  std::vector<std::string> estimators{"add(0.5)"};
  std::size_t trials = 100;
  std::uint64_t master_seed = 20190101;
  bool burn_in = false;
  /// Mode for matrix estimators; predictor-only estimators always use prediction.
  RiskMode risk_mode = RiskMode::estimation_max;
  /// Scale the prediction upper bound's leading constant from 2 to 1/2.
  bool adjust_prediction_constant = false;
};

struct ResultRow {
  std::string experiment;
  std::uint64_t k = 0;
  std::uint64_t n = 0;
  double delta = 0.0;
  std::string divergence;
  std::string estimator;
  RiskMode risk_mode = RiskMode::estimation_max;
  std::size_t trials = 0;
  double mean_loss = 0.0;
  double std_error = 0.0;
  /// NaN when no bound applies.
  double theory_value = 0.0;
  std::uint64_t master_seed = 0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

/// fig1a .. fig1d. Returns nullopt for unknown names.
std::optional<ExperimentConfig> preset(std::string_view name);
std::vector<std::string> preset_names();

/// The n grid the config expands to, ascending, without duplicates.
std::vector<std::uint64_t> n_grid(const ExperimentConfig& config);

/// Throws ValidationError naming the offending field.
void validate(const ExperimentConfig& config);

/// Seed of the chain behind one curve.
std::uint64_t curve_seed(std::uint64_t master_seed, const std::string& estimator,
                         const std::string& divergence, std::uint64_t k);

/// Bound reported next to a measured risk: the closed-form upper bound, using
/// the chain's smallest stationary probability for max-mode estimation.
/// NaN when no bound covers the loss.
double theory_value(const DivergenceSpec& spec, RiskMode mode, std::uint64_t k, std::uint64_t n,
                    double min_stationary, bool adjust_prediction_constant);

/// Runs every grid point. The output depends only on the config, never on
/// `workers`.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config, std::size_t workers = 1);

}  // namespace mkrisk
