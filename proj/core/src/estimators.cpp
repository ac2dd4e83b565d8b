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

#include "markov_risk/estimators.hpp"

#include <charconv>
#include <cmath>
#include <string>
#include <vector>

#include "markov_risk/errors.hpp"

namespace mkrisk {

namespace {

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <class RowFn>
TransitionMatrix build_rows(const TransitionCounts& counts, RowFn row) {
  const std::size_t k = counts.size();
  std::vector<std::vector<double>> rows(k, std::vector<double>(k));
  for (State i = 0; i < k; ++i) {
    for (State j = 0; j < k; ++j) rows[i][j] = row(i, j);
  }
  return TransitionMatrix(rows);
}

}  // namespace

TransitionMatrix add_beta_matrix(const TransitionCounts& counts, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw ValidationError("add-beta estimator requires beta > 0");
  }
  const auto k = static_cast<double>(counts.size());
  return build_rows(counts, [&](State i, State j) {
    return (static_cast<double>(counts.pair(i, j)) + beta) /
           (static_cast<double>(counts.from(i)) + k * beta);
  });
}

TransitionMatrix add_sqrt_matrix(const TransitionCounts& counts) {
  const auto k = static_cast<double>(counts.size());
  return build_rows(counts, [&](State i, State j) {
    const auto ni = static_cast<double>(counts.from(i));
    if (ni == 0.0) return 1.0 / k;
    const double root = std::sqrt(ni);
    return (static_cast<double>(counts.pair(i, j)) + root / k) / (ni + root);
  });
}

TransitionMatrix empirical_matrix(const TransitionCounts& counts) {
  const auto k = static_cast<double>(counts.size());
  return build_rows(counts, [&](State i, State j) {
    const auto ni = static_cast<double>(counts.from(i));
    if (ni == 0.0) return 1.0 / k;
    return static_cast<double>(counts.pair(i, j)) / ni;
  });
}

TailRunClassification classify_tail_run(const SampleSequence& x) {
  const std::size_t n = x.size();
  if (n < 2) throw ValidationError("classify_tail_run: need at least 2 samples");
  TailRunClassification c;
  c.state = x.back();
  c.run_length = 1;
  while (c.run_length < n && x[n - 1 - c.run_length] == c.state) ++c.run_length;
  if (c.run_length > n - 1) return c;
  c.member = true;
  for (std::size_t t = 0; t < n - c.run_length; ++t) {
    if (x[t] == c.state) {
      c.member = false;
      break;
    }
  }
  return c;
}

Distribution tail_run_prediction(const TailRunClassification& c, std::size_t n, std::size_t k) {
  if (!c.member) {
    throw ValidationError("tail_run_prediction: sequence is not a tail-run member");
  }
  if (n < 3) throw ValidationError("tail_run_prediction: needs n >= 3");
  if (c.state >= k || c.run_length < 1 || c.run_length >= n) {
    throw ValidationError("tail_run_prediction: inconsistent classification");
  }
  const auto len = static_cast<double>(c.run_length);
  const auto size = static_cast<double>(n);
  const double stay = len <= size / 2.0 ? 1.0 - 1.0 / (len * std::log(size)) : 1.0 - 1.0 / len;
  std::vector<double> p(k, (1.0 - stay) / static_cast<double>(k - 1));
  p[c.state] = stay;
  return Distribution(std::move(p));
}

Distribution hybrid_predict(const SampleSequence& x, double beta) {
  const auto c = classify_tail_run(x);
  if (c.member && x.size() >= 3) return tail_run_prediction(c, x.size(), x.alphabet());
  return add_beta_matrix(count_transitions(x), beta).row(x.back());
}

std::string EstimatorSpec::name() const {
  switch (kind) {
    case Kind::empirical:
      return "empirical";
    case Kind::add_beta:
      return "add(" + shortest(beta) + ")";
    case Kind::add_sqrt:
      return "add-sqrt";
    case Kind::hybrid:
      return "hybrid";
  }
  return "?";
}

EstimatorSpec parse_estimator(std::string_view token) {
  EstimatorSpec spec;
  if (token == "empirical") {
    spec.kind = EstimatorSpec::Kind::empirical;
  } else if (token == "add-sqrt") {
    spec.kind = EstimatorSpec::Kind::add_sqrt;
  } else if (token == "hybrid") {
    spec.kind = EstimatorSpec::Kind::hybrid;
  } else if (token.starts_with("add(") && token.ends_with(")")) {
    const auto body = token.substr(4, token.size() - 5);
    double beta = 0.0;
    auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), beta);
    if (ec != std::errc{} || ptr != body.data() + body.size() || !(beta > 0.0)) {
      throw ValidationError("add(<beta>) needs a positive number, got '" + std::string(token) +
                            "'");
    }
    spec.kind = EstimatorSpec::Kind::add_beta;
    spec.beta = beta;
  } else {
    throw ValidationError("unknown estimator '" + std::string(token) +
                          "' (expected empirical, add(<beta>), add-sqrt, hybrid)");
  }
  return spec;
}

MatrixEstimator make_matrix_estimator(const EstimatorSpec& spec) {
  switch (spec.kind) {
    case EstimatorSpec::Kind::empirical:
      return [](const SampleSequence& x) { return empirical_matrix(count_transitions(x)); };
    case EstimatorSpec::Kind::add_beta:
      return [beta = spec.beta](const SampleSequence& x) {
        return add_beta_matrix(count_transitions(x), beta);
      };
    case EstimatorSpec::Kind::add_sqrt:
      return [](const SampleSequence& x) { return add_sqrt_matrix(count_transitions(x)); };
    case EstimatorSpec::Kind::hybrid:
      break;
  }
  throw ValidationError("estimator '" + spec.name() + "' only predicts the next state");
}

Predictor make_predictor(const EstimatorSpec& spec) {
  if (spec.kind == EstimatorSpec::Kind::hybrid) {
    return [](const SampleSequence& x) { return hybrid_predict(x, 0.5); };
  }
  auto estimate = make_matrix_estimator(spec);
  return [estimate](const SampleSequence& x) { return estimate(x).row(x.back()); };
}

}  // namespace mkrisk
