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

#include "markov_risk/lower_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "markov_risk/errors.hpp"
#include "markov_risk/parallel.hpp"

namespace mkrisk {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(std::span<const double> terms) {
  double top = kNegInf;
  for (double t : terms) top = std::max(top, t);
  if (top == kNegInf) return kNegInf;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - top);
  return top + std::log(s);
}

double log_likelihood(const MarkovChain& chain, const SampleSequence& x) {
  double ll = std::log(chain.initial()[x[0]]);
  for (std::size_t t = 1; t < x.size() && ll != kNegInf; ++t) {
    ll += std::log(chain.matrix()(x[t - 1], x[t]));
  }
  return ll;
}

}  // namespace

std::vector<double> build_v_n(std::uint64_t n) {
  if (n < 16) {
    throw ValidationError("build_v_n: n must be at least 16, got " + std::to_string(n));
  }
  const double ln_n = std::log(static_cast<double>(n));
  const auto top = static_cast<std::size_t>(std::floor(ln_n / (2.0 * std::log(ln_n))));
  if (top < 1) throw ValidationError("build_v_n: index range is empty for n = " + std::to_string(n));
  std::vector<double> values;
  for (std::size_t t = 1; t <= top; ++t) values.push_back(std::pow(ln_n, -static_cast<double>(t)));
  return values;
}

PredictionPrior::PredictionPrior(std::size_t k, std::uint64_t n)
    : PredictionPrior(k, n, build_v_n(n)) {}

PredictionPrior::PredictionPrior(std::size_t k, std::uint64_t n, std::vector<double> values)
    : k_(k), n_(n), values_(std::move(values)) {
  if (k_ < 2 || k_ % 2 != 0) throw ValidationError("prediction prior needs an even k >= 2");
  if (values_.empty()) throw ValidationError("prediction prior needs a non-empty value set");
  if (!(band() - off_band() > 0.0)) {
    throw ValidationError("prediction prior needs n > k - 1 so every entry is positive");
  }
  for (double v : values_) {
    if (!(v > 0.0 && v < band())) {
      throw ValidationError("prediction prior values must lie in (0, b)");
    }
  }
}

MarkovChain PredictionPrior::chain(std::span<const double> params) const {
  if (params.size() != parameter_count()) {
    throw ValidationError("prediction prior chain needs " + std::to_string(parameter_count()) +
                          " parameters");
  }
  const double a = off_band();
  const double b = band();
  std::vector<std::vector<double>> rows(k_, std::vector<double>(k_, a));
  for (State s = 0; s < k_; ++s) {
    if (!is_parameterised(s)) {
      rows[s][s] = b - a;
      continue;
    }
    const double v = params[s / 2];
    if (std::find(values_.begin(), values_.end(), v) == values_.end()) {
      throw ValidationError("prediction prior parameter is not in the value set");
    }
    rows[s][s - 1] = v;
    rows[s][s] = b - v;
  }
  return MarkovChain(Distribution::uniform(k_), TransitionMatrix(rows));
}

std::vector<MarkovChain> PredictionPrior::all_chains() const {
  const std::size_t m = parameter_count();
  std::vector<std::size_t> index(m, 0);
  std::vector<double> params(m);
  std::vector<MarkovChain> out;
  while (true) {
    for (std::size_t j = 0; j < m; ++j) params[j] = values_[index[j]];
    out.push_back(chain(params));
    std::size_t pos = m;
    while (pos > 0) {
      --pos;
      if (++index[pos] < values_.size()) break;
      index[pos] = 0;
      if (pos == 0) return out;
    }
  }
}

Distribution bayes_bruteforce(std::span<const MarkovChain> prior_set, const SampleSequence& x) {
  if (prior_set.empty()) throw ValidationError("bayes_bruteforce: empty prior set");
  const std::size_t k = prior_set.front().size();
  if (x.alphabet() != k) throw ValidationError("bayes_bruteforce: alphabet mismatch");
  std::vector<double> logw;
  logw.reserve(prior_set.size());
  for (const auto& chain : prior_set) {
    if (chain.size() != k) throw ValidationError("bayes_bruteforce: chains differ in size");
    logw.push_back(log_likelihood(chain, x));
  }
  const double norm = log_sum_exp(logw);
  if (norm == kNegInf) {
    throw ValidationError("bayes_bruteforce: every chain gives the sequence probability zero");
  }
  std::vector<double> mix(k, 0.0);
  for (std::size_t c = 0; c < prior_set.size(); ++c) {
    const double w = std::exp(logw[c] - norm);
    if (w == 0.0) continue;
    const auto row = prior_set[c].matrix().row(x.back()).probs();
    for (State j = 0; j < k; ++j) mix[j] += w * row[j];
  }
  return Distribution(std::move(mix));
}

Distribution bayes_closed_form(const PredictionPrior& prior, const TailRunClassification& c) {
  if (!c.member) throw ValidationError("bayes_closed_form: sequence is not a tail-run member");
  const std::size_t k = prior.k();
  if (c.state >= k || c.run_length < 1 || c.run_length >= prior.n()) {
    throw ValidationError("bayes_closed_form: classification inconsistent with the prior");
  }
  const double a = prior.off_band();
  const double b = prior.band();
  std::vector<double> p(k, a);
  if (!PredictionPrior::is_parameterised(c.state)) {
    p[c.state] = b - a;
    return Distribution(std::move(p));
  }
  // Posterior weights over the value set are proportional to (b-v)^{l-1};
  // the two ratios are then weighted means of b-v and v, so they sum to b.
  const auto len = static_cast<double>(c.run_length);
  std::vector<double> logw;
  for (double v : prior.values()) logw.push_back((len - 1.0) * std::log(b - v));
  const double norm = log_sum_exp(logw);
  double stay = 0.0, jump = 0.0;
  for (std::size_t i = 0; i < logw.size(); ++i) {
    const double w = std::exp(logw[i] - norm);
    stay += w * (b - prior.values()[i]);
    jump += w * prior.values()[i];
  }
  p[c.state] = stay;
  p[c.state - 1] = jump;
  return Distribution(std::move(p));
}

double tail_run_probability(const PredictionPrior& prior, double v, std::size_t run_length) {
  const auto n = static_cast<double>(prior.n());
  const auto k = static_cast<double>(prior.k());
  const auto len = static_cast<double>(run_length);
  if (run_length < 1 || run_length >= prior.n()) {
    throw ValidationError("tail_run_probability: run length must be in 1..n-1");
  }
  const double log_p = std::log((k - 1.0) / k) + (n - len - 1.0) * std::log1p(-1.0 / n) -
                       std::log(n) + (len - 1.0) * std::log(prior.band() - v);
  return std::exp(log_p);
}

double prediction_prior_partial_bayes_risk(const PredictionPrior& prior) {
  const auto kl = DivergenceSpec::kl();
  const std::size_t k = prior.k();
  const double a = prior.off_band();
  const double b = prior.band();
  // State 1 (0-based) stands in for every parameterised state.
  TailRunClassification c{true, 1, 1};
  std::vector<double> row(k, a);
  double per_state = 0.0;
  for (std::size_t len = 1; len < prior.n(); ++len) {
    c.run_length = len;
    const auto estimate = bayes_closed_form(prior, c);
    for (double v : prior.values()) {
      row[0] = v;
      row[1] = b - v;
      per_state += tail_run_probability(prior, v, len) * kl.evaluate(row, estimate.probs());
    }
  }
  per_state /= static_cast<double>(prior.values().size());
  return static_cast<double>(prior.parameter_count()) * per_state;
}

EstimationPrior::EstimationPrior(std::size_t k, std::uint64_t n, double delta, double pi_star,
                                 double epsilon)
    : k_(k), n_(n), delta_(delta), pi_star_(pi_star), epsilon_(epsilon) {
  const auto kd = static_cast<double>(k_);
  if (k_ < 3) throw ValidationError("estimation prior needs k >= 3");
  if (n_ < 1) throw ValidationError("estimation prior needs n >= 1");
  if (!(pi_star_ > 0.0 && pi_star_ <= 1.0 / kd)) {
    throw ValidationError("estimation prior needs pi* in (0, 1/k]");
  }
  if (!(epsilon_ > 0.0 && epsilon_ < 1.0)) {
    throw ValidationError("estimation prior needs epsilon in (0, 1)");
  }
  if (!(delta_ > 0.0 && delta_ < 1.0 / kd)) {
    throw ValidationError("estimation prior needs delta in (0, 1/k)");
  }
  const double centre = 1.0 / (kd - 1.0);
  if (!(radius() < centre)) {
    throw ValidationError("estimation prior ball radius " + std::to_string(radius()) +
                          " must be below 1/(k-1); increase n");
  }
  const double pi_bar = 1.0 - pi_star_;
  const double smallest = std::min({pi_bar * centre, pi_bar * (centre - radius()), pi_star_});
  if (smallest < delta_) {
    throw ValidationError("estimation prior entries can fall below delta = " +
                          std::to_string(delta_));
  }
}

double EstimationPrior::reduced_size() const {
  return std::pow(static_cast<double>(n_) * (1.0 + epsilon_) * pi_star_, 0.2);
}

Distribution EstimationPrior::target() const {
  std::vector<double> p(k_, (1.0 - pi_star_) / static_cast<double>(k_ - 1));
  p[k_ - 1] = pi_star_;
  return Distribution(std::move(p));
}

bool EstimationPrior::in_ball(std::span<const double> point) const {
  if (point.size() != k_ - 1) return false;
  const double centre = 1.0 / static_cast<double>(k_ - 1);
  double total = 0.0;
  for (double p : point) {
    if (!(std::abs(p - centre) < radius())) return false;
    total += p;
  }
  return std::abs(total - 1.0) <= kSimplexTolerance;
}

MarkovChain EstimationPrior::chain(std::span<const double> ball_point) const {
  if (!in_ball(ball_point)) throw ValidationError("estimation prior point is outside the ball");
  const auto p_star = target();
  std::vector<Distribution> rows(k_ - 1, p_star);
  std::vector<double> last(k_);
  for (std::size_t j = 0; j + 1 < k_; ++j) last[j] = (1.0 - pi_star_) * ball_point[j];
  last[k_ - 1] = pi_star_;
  rows.emplace_back(std::move(last));
  return MarkovChain(p_star, TransitionMatrix(std::move(rows)));
}

std::vector<double> sample_ball(const EstimationPrior& prior, Rng& rng) {
  const std::size_t m = prior.k() - 1;
  const double centre = 1.0 / static_cast<double>(m);
  const double r = prior.radius();
  std::vector<double> p(m);
  for (int attempt = 0; attempt < 1'000'000; ++attempt) {
    double partial = 0.0;
    bool inside = true;
    for (std::size_t j = 0; j + 1 < m; ++j) {
      p[j] = centre - r + 2.0 * r * rng.uniform();
      inside = inside && std::abs(p[j] - centre) < r;
      partial += p[j];
    }
    p[m - 1] = 1.0 - partial;
    if (inside && std::abs(p[m - 1] - centre) < r) return p;
  }
  throw ConvergenceError("sample_ball: rejection sampling failed after 10^6 attempts");
}

MarkovChain estimation_prior_sample(const EstimationPrior& prior, Rng& rng) {
  return prior.chain(sample_ball(prior, rng));
}

MarkovChain estimation_prior_sample(const EstimationPrior& prior, std::uint64_t seed) {
  Rng rng(seed);
  return estimation_prior_sample(prior, rng);
}

RiskEstimate estimation_prior_bayes_gap(const EstimationPrior& prior,
                                        const MatrixEstimator& estimator,
                                        const DivergenceSpec& spec, std::size_t trials,
                                        std::uint64_t seed, std::size_t workers) {
  return estimation_prior_bayes_gap(
      prior, [&](const SampleSequence& x, const MarkovChain&) { return estimator(x); }, spec,
      trials, seed, workers);
}

RiskEstimate estimation_prior_bayes_gap(const EstimationPrior& prior,
                                        const TruthAwareEstimator& estimator,
                                        const DivergenceSpec& spec, std::size_t trials,
                                        std::uint64_t seed, std::size_t workers) {
  if (trials < 1) throw ValidationError("estimation_prior_bayes_gap needs at least one trial");
  const State last = prior.k() - 1;
  std::vector<double> losses(trials);
  parallel_for(trials, workers, [&](std::size_t t) {
    Rng rng = Rng::substream(seed, t);
    const auto chain = estimation_prior_sample(prior, rng);
    const auto x = sample_sequence(chain, prior.n(), rng);
    const auto estimate = estimator(x, chain);
    losses[t] = spec.evaluate(chain.matrix().row(last).probs(), estimate.row(last).probs());
  });
  const auto s = summarize(losses);
  return RiskEstimate{s.mean, s.std_error, trials, RiskMode::estimation_max, false};
}

}  // namespace mkrisk
