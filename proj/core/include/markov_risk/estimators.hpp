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
#include <functional>
#include <string>
#include <string_view>

#include "markov_risk/markov_core.hpp"

namespace mkrisk {

/// Smoothed transition-matrix estimate (N_ij + beta) / (N_i + k beta).
TransitionMatrix add_beta_matrix(const TransitionCounts& counts, double beta);

/// (N_ij + sqrt(N_i)/k) / (N_i + sqrt(N_i)); rows with N_i = 0 are uniform.
TransitionMatrix add_sqrt_matrix(const TransitionCounts& counts);

/// N_ij / N_i; rows with N_i = 0 are uniform.
TransitionMatrix empirical_matrix(const TransitionCounts& counts);

/// Where a sequence sits relative to the tail-run event: the last state
/// `state`, the length of its trailing run, and whether that state is absent
/// from everything before the run (with at least one earlier sample).
struct TailRunClassification {
  bool member = false;
  State state = 0;
  std::size_t run_length = 1;
};

/// Requires n >= 2.
TailRunClassification classify_tail_run(const SampleSequence& x);

/// Next-state prediction for a tail-run member: the repeating state gets
/// 1 - 1/(l ln n) when l <= n/2 and 1 - 1/l otherwise; the remaining mass is
/// split evenly. Requires member and n >= 3.
Distribution tail_run_prediction(const TailRunClassification& c, std::size_t n, std::size_t k);

/// Tail-run members (n >= 3) get tail_run_prediction; every other sequence
/// gets row x_n of the add-beta estimate.
Distribution hybrid_predict(const SampleSequence& x, double beta = 0.5);

using MatrixEstimator = std::function<TransitionMatrix(const SampleSequence&)>;
using Predictor = std::function<Distribution(const SampleSequence&)>;

/// Named estimator as written in CLI flags and CSV: empirical, add(<beta>),
/// add-sqrt, hybrid.
struct EstimatorSpec {
  enum class Kind { empirical, add_beta, add_sqrt, hybrid };

  Kind kind = Kind::add_beta;
  double beta = 0.5;

  /// hybrid only predicts; the others produce a full matrix.
  bool is_predictor_only() const { return kind == Kind::hybrid; }
  std::string name() const;
};

EstimatorSpec parse_estimator(std::string_view token);

/// Throws ValidationError for hybrid, which does not estimate a matrix.
MatrixEstimator make_matrix_estimator(const EstimatorSpec& spec);

/// Matrix estimators predict with row x_n of their estimate.
Predictor make_predictor(const EstimatorSpec& spec);

}  // namespace mkrisk
