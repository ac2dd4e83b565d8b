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
#include <functional>
#include <span>
#include <vector>

#include "markov_risk/divergences.hpp"
#include "markov_risk/estimators.hpp"
#include "markov_risk/markov_core.hpp"
#include "markov_risk/risk_eval.hpp"

namespace mkrisk {

/// Geometric grid {1/(ln n)^t : t = 1..floor(ln n / (2 ln ln n))}, descending.
/// Requires n >= 16 so the grid is non-empty.
std::vector<double> build_v_n(std::uint64_t n);

/// Finite family of k-state chains (k even) used to lower-bound prediction
/// risk. With a = 1/n and b = 1 - (k-2)/n, the rows of states 1, 3, 5, ...
/// (0-based 0, 2, 4, ...) put b - a on the diagonal and a elsewhere; the rows
/// of states 2, 4, ... (0-based 1, 3, ...) put a free parameter v at the
/// column just before the diagonal, b - v on the diagonal and a elsewhere.
/// Every parameter ranges independently over a value set, so the prior is
/// uniform over the product set. The initial law is uniform.
class PredictionPrior {
 public:
  /// Value set V_n = build_v_n(n).
  PredictionPrior(std::size_t k, std::uint64_t n);
  /// Explicit value set, for sample sizes too small for V_n.
  PredictionPrior(std::size_t k, std::uint64_t n, std::vector<double> values);

  std::size_t k() const { return k_; }
  std::uint64_t n() const { return n_; }
  double off_band() const { return 1.0 / static_cast<double>(n_); }
  double band() const { return 1.0 - static_cast<double>(k_ - 2) / static_cast<double>(n_); }
  std::span<const double> values() const { return values_; }

  /// Parameterised rows: the 0-based odd states 1, 3, ..., k-1.
  std::size_t parameter_count() const { return k_ / 2; }
  static bool is_parameterised(State s) { return s % 2 == 1; }

  /// params[j] is the parameter of 0-based state 2j + 1; each must be in values().
  MarkovChain chain(std::span<const double> params) const;

  /// Every chain of the product prior, parameters enumerated lexicographically.
  std::vector<MarkovChain> all_chains() const;

 private:
  std::size_t k_;
  std::uint64_t n_;
  std::vector<double> values_;
};

/// Posterior-mean next-state law under a uniform prior over `prior_set`:
/// sum_P P(x^n) P(x_n, .) / sum_P P(x^n). Likelihoods are combined in log
/// space. Throws ValidationError when every chain gives x^n probability 0.
Distribution bayes_bruteforce(std::span<const MarkovChain> prior_set, const SampleSequence& x);

/// Closed form of the posterior mean on tail-run members. For a
/// parameterised state s with run length l it is a off the band,
/// sum_v (b-v)^l / sum_v (b-v)^{l-1} at s and
/// sum_v (b-v)^{l-1} v / sum_v (b-v)^{l-1} at s-1; for other states it is
/// the fixed row. Sums are evaluated in log space.
Distribution bayes_closed_form(const PredictionPrior& prior, const TailRunClassification& c);

/// Exact probability that a chain whose state s has parameter v emits a
/// sequence ending in a run of exactly l copies of s that never occurred
/// before: (k-1)/k (1-1/n)^{n-l-1} (1/n) (b-v)^{l-1}. Parameterised s only.
double tail_run_probability(const PredictionPrior& prior, double v, std::size_t run_length);

/// Prior-averaged KL prediction risk of the Bayes estimator restricted to
/// tail-run members, summed over run lengths 1..n-1. Non-parameterised states
/// contribute nothing (the Bayes estimate equals their row), and each
/// parameterised state contributes the same average over the value set, so
/// no sequences are enumerated.
double prediction_prior_partial_bayes_risk(const PredictionPrior& prior);

/// Family of chains with a fixed minimum stationary probability pi*: the
/// first k-1 rows equal p* = (pi_bar/(k-1), ..., pi_bar/(k-1), pi*), the last
/// row is (pi_bar p', pi*) for p' drawn uniformly from the L-infinity ball of
/// radius 1/n' around the uniform law on k-1 symbols, with
/// n' = (n (1 + eps) pi*)^{1/5}. The initial law is p*.
class EstimationPrior {
 public:
  EstimationPrior(std::size_t k, std::uint64_t n, double delta, double pi_star, double epsilon);

  std::size_t k() const { return k_; }
  std::uint64_t n() const { return n_; }
  double delta() const { return delta_; }
  double pi_star() const { return pi_star_; }
  double epsilon() const { return epsilon_; }
  /// n' = (n (1 + eps) pi*)^{1/5}.
  double reduced_size() const;
  /// 1 / n'.
  double radius() const { return 1.0 / reduced_size(); }
  Distribution target() const;

  /// ||p' - u_{k-1}||_inf < radius and sum p' = 1.
  bool in_ball(std::span<const double> point) const;

  MarkovChain chain(std::span<const double> ball_point) const;

 private:
  std::size_t k_;
  std::uint64_t n_;
  double delta_;
  double pi_star_;
  double epsilon_;
};

/// Uniform draw from the ball: the first k-2 coordinates are uniform on their
/// slab, the last is forced by normalisation and the draw is accepted when it
/// also lies in the slab. Gives up after 10^6 attempts.
std::vector<double> sample_ball(const EstimationPrior& prior, Rng& rng);

MarkovChain estimation_prior_sample(const EstimationPrior& prior, Rng& rng);
MarkovChain estimation_prior_sample(const EstimationPrior& prior, std::uint64_t seed);

/// Estimator that may look at the true chain (for oracle baselines).
using TruthAwareEstimator =
    std::function<TransitionMatrix(const SampleSequence&, const MarkovChain& truth)>;

/// Monte Carlo mean over prior draws of the loss on the last state's row,
/// the only row the prior randomises. Trial t draws the chain and then the
/// sample from Rng::substream(seed, t).
RiskEstimate estimation_prior_bayes_gap(const EstimationPrior& prior,
                                        const MatrixEstimator& estimator,
                                        const DivergenceSpec& spec, std::size_t trials,
                                        std::uint64_t seed, std::size_t workers = 1);
RiskEstimate estimation_prior_bayes_gap(const EstimationPrior& prior,
                                        const TruthAwareEstimator& estimator,
                                        const DivergenceSpec& spec, std::size_t trials,
                                        std::uint64_t seed, std::size_t workers = 1);

}  // namespace mkrisk
