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

#include "markov_risk/markov_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "markov_risk/errors.hpp"

namespace mkrisk {

namespace {

std::vector<double> cumulative_sums(std::span<const double> p) {
  std::vector<double> c(p.size());
  std::partial_sum(p.begin(), p.end(), c.begin());
  return c;
}

Distribution normalized(std::vector<double> v) {
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& x : v) x /= total;
  return Distribution(std::move(v));
}

}  // namespace

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.size() < 2) {
    throw ValidationError("distribution needs at least 2 states, got " +
                          std::to_string(probs_.size()));
  }
  double total = 0.0;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0) {
      throw ValidationError("distribution entries must be finite and nonnegative");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kSimplexTolerance) {
    throw ValidationError("distribution entries sum to " + std::to_string(total) + ", not 1");
  }
}

Distribution Distribution::uniform(std::size_t k) {
  return Distribution(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

Distribution Distribution::point_mass(std::size_t k, State s) {
  if (s >= k) throw ValidationError("point mass state out of range");
  std::vector<double> p(k, 0.0);
  p[s] = 1.0;
  return Distribution(std::move(p));
}

double Distribution::min() const { return *std::min_element(probs_.begin(), probs_.end()); }

TransitionMatrix::TransitionMatrix(std::vector<Distribution> rows) : rows_(std::move(rows)) {
  for (const auto& r : rows_) {
    if (r.size() != rows_.size()) {
      throw ValidationError("transition matrix must be square: " + std::to_string(rows_.size()) +
                            " rows but a row of length " + std::to_string(r.size()));
    }
  }
}

TransitionMatrix::TransitionMatrix(const std::vector<std::vector<double>>& rows)
    : TransitionMatrix([&] {
        std::vector<Distribution> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.emplace_back(r);
        return out;
      }()) {}

TransitionMatrix::TransitionMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : TransitionMatrix([&] {
        std::vector<std::vector<double>> out;
        for (const auto& r : rows) out.emplace_back(r);
        return out;
      }()) {}

TransitionMatrix TransitionMatrix::identity(std::size_t k) {
  std::vector<Distribution> rows;
  for (State i = 0; i < k; ++i) rows.push_back(Distribution::point_mass(k, i));
  return TransitionMatrix(std::move(rows));
}

TransitionMatrix TransitionMatrix::uniform(std::size_t k) {
  return TransitionMatrix(std::vector<Distribution>(k, Distribution::uniform(k)));
}

double TransitionMatrix::min() const {
  double m = 1.0;
  for (const auto& r : rows_) m = std::min(m, r.min());
  return m;
}

std::vector<double> TransitionMatrix::left_multiply(std::span<const double> v) const {
  const std::size_t k = size();
  std::vector<double> out(k, 0.0);
  for (State i = 0; i < k; ++i) {
    const double vi = v[i];
    if (vi == 0.0) continue;
    const auto r = rows_[i].probs();
    for (State j = 0; j < k; ++j) out[j] += vi * r[j];
  }
  return out;
}

MarkovChain::MarkovChain(Distribution initial, TransitionMatrix matrix)
    : initial_(std::move(initial)), matrix_(std::move(matrix)) {
  if (initial_.size() != matrix_.size()) {
    throw ValidationError("initial law has " + std::to_string(initial_.size()) +
                          " states but the matrix has " + std::to_string(matrix_.size()));
  }
}

SampleSequence::SampleSequence(std::vector<State> states, std::size_t k)
    : states_(std::move(states)), k_(k) {
  if (k_ < 2) throw ValidationError("alphabet size must be at least 2");
  for (State s : states_) {
    if (s >= k_) {
      throw ValidationError("state " + std::to_string(s) + " outside alphabet of size " +
                            std::to_string(k_));
    }
  }
}

SampleSequence SampleSequence::from_one_based(const std::vector<std::size_t>& labels,
                                              std::size_t k) {
  std::vector<State> states;
  states.reserve(labels.size());
  for (std::size_t label : labels) {
    if (label == 0 || label > k) {
      throw ValidationError("state label " + std::to_string(label) + " outside 1.." +
                            std::to_string(k));
    }
    states.push_back(label - 1);
  }
  return SampleSequence(std::move(states), k);
}

SampleSequence SampleSequence::drop_front(std::size_t first) const {
  if (first > states_.size()) throw ValidationError("cannot drop more samples than present");
  return SampleSequence(std::vector<State>(states_.begin() + static_cast<std::ptrdiff_t>(first),
                                           states_.end()),
                        k_);
}

TransitionCounts::TransitionCounts(std::vector<std::vector<std::uint64_t>> pairs)
    : pairs_(std::move(pairs)), from_(pairs_.size(), 0) {
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    if (pairs_[i].size() != pairs_.size()) {
      throw ValidationError("transition counts must be square");
    }
    from_[i] = std::accumulate(pairs_[i].begin(), pairs_[i].end(), std::uint64_t{0});
  }
}

std::uint64_t TransitionCounts::total() const {
  return std::accumulate(from_.begin(), from_.end(), std::uint64_t{0});
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("l1_distance: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

Distribution stationary_distribution(const TransitionMatrix& matrix, double tol,
                                     std::size_t max_iters) {
  if (!(tol > 0.0)) throw ValidationError("stationary_distribution: tol must be positive");
  const std::size_t k = matrix.size();
  std::vector<std::vector<double>> rows(k, std::vector<double>(k, 0.0));
  for (State i = 0; i < k; ++i) rows[i][i] = 1.0;

  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    bool unchanged = true;
    for (auto& r : rows) {
      auto next = matrix.left_multiply(r);
      if (next != r) unchanged = false;
      r = std::move(next);
    }
    double spread = 0.0;
    for (State i = 1; i < k; ++i) spread = std::max(spread, l1_distance(rows[i], rows[0]));
    if (spread <= tol) {
      std::vector<double> pi(k, 0.0);
      for (const auto& r : rows) {
        for (State j = 0; j < k; ++j) pi[j] += r[j] / static_cast<double>(k);
      }
      Distribution candidate = normalized(std::move(pi));
      if (l1_distance(matrix.left_multiply(candidate.probs()), candidate.probs()) <= tol) {
        return candidate;
      }
    } else if (unchanged) {
      break;
    }
  }
  throw ConvergenceError(
      "stationary_distribution: power iteration did not converge; the chain may be reducible "
      "or periodic, so its stationary law is not unique or not attracting");
}

SampleSequence sample_sequence(const MarkovChain& chain, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return sample_sequence(chain, n, rng);
}

SampleSequence sample_sequence(const MarkovChain& chain, std::size_t n, Rng& rng) {
  if (n < 1) throw ValidationError("sample_sequence: n must be at least 1");
  const std::size_t k = chain.size();
  std::vector<std::vector<double>> cumulative;
  cumulative.reserve(k);
  for (const auto& r : chain.matrix().rows()) cumulative.push_back(cumulative_sums(r.probs()));
  const auto start = cumulative_sums(chain.initial().probs());

  std::vector<State> states(n);
  states[0] = rng.categorical(start);
  for (std::size_t t = 1; t < n; ++t) states[t] = rng.categorical(cumulative[states[t - 1]]);
  return SampleSequence(std::move(states), k);
}

TransitionCounts count_transitions(const SampleSequence& x) {
  if (x.size() < 2) throw ValidationError("count_transitions: need at least 2 samples");
  const std::size_t k = x.alphabet();
  std::vector<std::vector<std::uint64_t>> pairs(k, std::vector<std::uint64_t>(k, 0));
  for (std::size_t t = 0; t + 1 < x.size(); ++t) ++pairs[x[t]][x[t + 1]];
  return TransitionCounts(std::move(pairs));
}

Distribution marginal_distribution(const MarkovChain& chain, std::size_t t) {
  if (t < 1) throw ValidationError("marginal_distribution: t must be at least 1");
  if (t == 1) return chain.initial();
  std::vector<double> p = chain.initial().values();
  for (std::size_t step = 1; step < t; ++step) p = chain.matrix().left_multiply(p);
  return normalized(std::move(p));
}

std::vector<double> hitting_time_pmf(const TransitionMatrix& matrix, State start, State target,
                                     std::size_t horizon) {
  const std::size_t k = matrix.size();
  if (start >= k || target >= k) throw ValidationError("hitting_time_pmf: state out of range");
  if (start == target) throw ValidationError("hitting_time_pmf: start must differ from target");
  if (horizon < 1) throw ValidationError("hitting_time_pmf: horizon must be at least 1");

  std::vector<double> pmf(horizon + 1, 0.0);
  // Mass that has not yet visited the target.
  std::vector<double> alive(k, 0.0);
  alive[start] = 1.0;
  for (std::size_t t = 1; t <= horizon; ++t) {
    alive = matrix.left_multiply(alive);
    pmf[t] = alive[target];
    alive[target] = 0.0;
  }
  return pmf;
}

std::vector<double> hitting_time_pmf(const MarkovChain& chain, State start, State target,
                                     std::size_t horizon) {
  return hitting_time_pmf(chain.matrix(), start, target, horizon);
}

Distribution sample_flat_dirichlet(std::size_t k, Rng& rng) {
  std::vector<double> e(k);
  for (double& x : e) x = rng.exponential();
  return normalized(std::move(e));
}

TransitionMatrix clamp_matrix(const TransitionMatrix& base, double delta) {
  const std::size_t k = base.size();
  if (!(delta >= 0.0) || delta * static_cast<double>(k) >= 1.0) {
    throw ValidationError("delta must lie in [0, 1/k); the clamped class is trivial otherwise");
  }
  if (delta == 0.0) return base;
  const double scale = 1.0 - static_cast<double>(k) * delta;
  std::vector<std::vector<double>> rows(k, std::vector<double>(k));
  for (State i = 0; i < k; ++i) {
    for (State j = 0; j < k; ++j) rows[i][j] = base(i, j) * scale + delta;
  }
  return TransitionMatrix(rows);
}

MarkovChain random_chain(std::size_t k, double delta, std::uint64_t seed) {
  if (k < 2) throw ValidationError("random_chain: k must be at least 2");
  if (!(delta >= 0.0) || delta * static_cast<double>(k) >= 1.0) {
    throw ValidationError("random_chain: delta must lie in [0, 1/k)");
  }
  Rng rng(seed);
  Distribution mu = sample_flat_dirichlet(k, rng);
  std::vector<Distribution> rows;
  rows.reserve(k);
  for (std::size_t i = 0; i < k; ++i) rows.push_back(sample_flat_dirichlet(k, rng));
  return MarkovChain(std::move(mu), clamp_matrix(TransitionMatrix(std::move(rows)), delta));
}

std::size_t burn_in_length(std::size_t n) {
  auto m = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  while (m * m > n) --m;
  while ((m + 1) * (m + 1) <= n) ++m;
  return m;
}

SampleSequence burn_in(const SampleSequence& x) {
  if (x.size() < 4) throw ValidationError("burn_in: need at least 4 samples");
  const std::size_t m = burn_in_length(x.size());
  if (x.size() - m < 2) throw ValidationError("burn_in: fewer than 2 samples would remain");
  return x.drop_front(m);
}

}  // namespace mkrisk
