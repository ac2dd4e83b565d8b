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
#include <initializer_list>
#include <span>
#include <vector>

#include "markov_risk/rng.hpp"

namespace mkrisk {

/// States are 0-based internally. External formats (CLI, CSV, docs) use 1-based
/// labels; convert with SampleSequence::from_one_based.
using State = std::size_t;

/// Tolerance for "sums to one" checks on probability vectors.
inline constexpr double kSimplexTolerance = 1e-12;

/// A probability vector over k >= 2 states.
class Distribution {
 public:
  explicit Distribution(std::vector<double> probs);
  Distribution(std::initializer_list<double> probs) : Distribution(std::vector<double>(probs)) {}

  static Distribution uniform(std::size_t k);
  static Distribution point_mass(std::size_t k, State s);

  std::size_t size() const { return probs_.size(); }
  double operator[](State i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }
  const std::vector<double>& values() const { return probs_; }

  double min() const;

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  std::vector<double> probs_;
};

/// Row-stochastic k x k matrix; row i is the law of the next state given i.
class TransitionMatrix {
 public:
  explicit TransitionMatrix(std::vector<Distribution> rows);
  explicit TransitionMatrix(const std::vector<std::vector<double>>& rows);
  TransitionMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static TransitionMatrix identity(std::size_t k);
  static TransitionMatrix uniform(std::size_t k);

  std::size_t size() const { return rows_.size(); }
  const Distribution& row(State i) const { return rows_[i]; }
  double operator()(State i, State j) const { return rows_[i][j]; }
  const std::vector<Distribution>& rows() const { return rows_; }

  /// Smallest entry.
  double min() const;

  /// v * M for a row vector v of length k.
  std::vector<double> left_multiply(std::span<const double> v) const;

  friend bool operator==(const TransitionMatrix&, const TransitionMatrix&) = default;

 private:
  std::vector<Distribution> rows_;
};

/// Initial law plus transition matrix.
class MarkovChain {
 public:
  MarkovChain(Distribution initial, TransitionMatrix matrix);

  std::size_t size() const { return matrix_.size(); }
  const Distribution& initial() const { return initial_; }
  const TransitionMatrix& matrix() const { return matrix_; }

 private:
  Distribution initial_;
  TransitionMatrix matrix_;
};

/// n observed states, each in [0, k).
class SampleSequence {
 public:
  SampleSequence(std::vector<State> states, std::size_t k);

  /// Builds a sequence from 1-based labels as written in external formats.
  static SampleSequence from_one_based(const std::vector<std::size_t>& labels, std::size_t k);

  std::size_t size() const { return states_.size(); }
  std::size_t alphabet() const { return k_; }
  State operator[](std::size_t t) const { return states_[t]; }
  State back() const { return states_.back(); }
  std::span<const State> states() const { return states_; }

  /// Suffix starting at offset `first`.
  SampleSequence drop_front(std::size_t first) const;

  friend bool operator==(const SampleSequence&, const SampleSequence&) = default;

 private:
  std::vector<State> states_;
  std::size_t k_;
};

/// Transition tallies of a sequence: pairs(i, j) is the number of times j
/// immediately follows i; from(i) = sum_j pairs(i, j) counts occurrences of i
/// among the first n-1 positions.
class TransitionCounts {
 public:
  explicit TransitionCounts(std::vector<std::vector<std::uint64_t>> pairs);

  std::size_t size() const { return pairs_.size(); }
  std::uint64_t from(State i) const { return from_[i]; }
  std::uint64_t pair(State i, State j) const { return pairs_[i][j]; }
  const std::vector<std::uint64_t>& from_counts() const { return from_; }
  std::uint64_t total() const;

 private:
  std::vector<std::vector<std::uint64_t>> pairs_;
  std::vector<std::uint64_t> from_;
};

/// L1 distance between two equal-length vectors.
double l1_distance(std::span<const double> a, std::span<const double> b);

/// Stationary law by power iteration. Every basis vector is iterated under M
/// (the rows of M^t); convergence requires those rows to coalesce and
/// ||pi M - pi||_1 <= tol. Reducible or periodic chains never coalesce and
/// raise ConvergenceError.
Distribution stationary_distribution(const TransitionMatrix& matrix, double tol = 1e-12,
                                     std::size_t max_iters = 1'000'000);

/// X_1 ~ mu, X_{t+1} ~ M(X_t, .). Deterministic in `seed`.
SampleSequence sample_sequence(const MarkovChain& chain, std::size_t n, std::uint64_t seed);
SampleSequence sample_sequence(const MarkovChain& chain, std::size_t n, Rng& rng);

/// Requires n >= 2.
TransitionCounts count_transitions(const SampleSequence& x);

/// Law of X_t, i.e. mu M^{t-1}, by repeated vector-matrix products. t >= 1.
Distribution marginal_distribution(const MarkovChain& chain, std::size_t t);

/// pmf[t] = Pr_start(first visit to target happens at step t), t = 0..horizon.
/// pmf[0] is always 0. Exact taboo-chain recursion.
std::vector<double> hitting_time_pmf(const TransitionMatrix& matrix, State start, State target,
                                     std::size_t horizon);
std::vector<double> hitting_time_pmf(const MarkovChain& chain, State start, State target,
                                     std::size_t horizon);

/// Row-wise flat Dirichlet draw: k unit exponentials, normalized.
Distribution sample_flat_dirichlet(std::size_t k, Rng& rng);

/// M = base (1 - k delta) + delta J. Requires 0 <= delta < 1/k.
TransitionMatrix clamp_matrix(const TransitionMatrix& base, double delta);

/// Random chain with Dirichlet(1) initial law and rows, clamped so every
/// transition probability is at least delta.
MarkovChain random_chain(std::size_t k, double delta, std::uint64_t seed);

/// floor(sqrt(n)).
std::size_t burn_in_length(std::size_t n);

/// Drops the first floor(sqrt(n)) samples. Requires n >= 4.
SampleSequence burn_in(const SampleSequence& x);

}  // namespace mkrisk
