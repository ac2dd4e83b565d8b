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

#include "markov_risk/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "markov_risk/errors.hpp"

namespace mkrisk {

namespace {

struct RiskToken {
  BoundRisk risk;
  std::string_view token;
};

constexpr RiskToken kRiskTokens[] = {
    {BoundRisk::prediction_kl, "prediction_kl"},
    {BoundRisk::estimation_f, "estimation_f"},
    {BoundRisk::estimation_f_weighted, "estimation_f_weighted"},
    {BoundRisk::estimation_l2, "estimation_l2"},
    {BoundRisk::estimation_l2_weighted, "estimation_l2_weighted"},
    {BoundRisk::iid_kl, "iid_kl"},
};

// Which class constraint the query uses, and its value.
struct ClassParam {
  bool pi_class;
  double value;
};

ClassParam class_param(const BoundQuery& q) {
  const double kd = static_cast<double>(q.k);
  if (q.pi_star) {
    const double p = *q.pi_star;
    if (!(p > 0.0 && p <= 1.0 / kd)) throw ValidationError("pi_star must lie in (0, 1/k]");
    return {true, p};
  }
  if (q.delta) {
    const double d = *q.delta;
    if (!(d > 0.0 && d < 1.0 / kd)) throw ValidationError("delta must lie in (0, 1/k)");
    return {false, d};
  }
  throw ValidationError(std::string(to_string(q.risk)) + " bound needs delta or pi_star");
}

}  // namespace

std::string_view to_string(BoundSide side) { return side == BoundSide::lower ? "lower" : "upper"; }

std::string_view to_string(BoundRisk risk) {
  for (const auto& t : kRiskTokens) {
    if (t.risk == risk) return t.token;
  }
  return "unknown";
}

BoundSide parse_bound_side(std::string_view token) {
  if (token == "lower") return BoundSide::lower;
  if (token == "upper") return BoundSide::upper;
  throw ValidationError("unknown bound side '" + std::string(token) + "' (lower|upper)");
}

BoundRisk parse_bound_risk(std::string_view token) {
  for (const auto& t : kRiskTokens) {
    if (t.token == token) return t.risk;
  }
  throw ValidationError("unknown bound risk '" + std::string(token) + "'");
}

double bound(const BoundQuery& q) {
  if (q.k < 2) throw ValidationError("bound: k must be at least 2");
  if (q.n < 3) throw ValidationError("bound: n must be at least 3");
  if (!(std::isfinite(q.curvature) && q.curvature > 0.0)) {
    throw ValidationError("bound: curvature must be positive and finite");
  }
  const double k = static_cast<double>(q.k);
  const double n = static_cast<double>(q.n);
  const double f2 = q.curvature;
  const bool lower = q.side == BoundSide::lower;

  switch (q.risk) {
    case BoundRisk::prediction_kl: {
      const double lln = std::log(std::log(n));
      return lower ? (k - 1.0) * lln / (4.0 * std::numbers::e * n) : 2.0 * k * k * lln / n;
    }
    case BoundRisk::iid_kl:
      return (k - 1.0) / (2.0 * n);
    case BoundRisk::estimation_f: {
      const auto [pi_class, c] = class_param(q);
      (void)pi_class;
      return lower ? (1.0 - c) * (k - 2.0) * f2 / (2.0 * n * c) : (k - 1.0) * f2 / (2.0 * n * c);
    }
    case BoundRisk::estimation_f_weighted: {
      const auto [pi_class, c] = class_param(q);
      if (!lower) return (k - 1.0) * k * f2 / (2.0 * n);
      // The delta class is tight up to constants; its lower form matches the upper one.
      return pi_class ? (1.0 - c) * (k - 2.0) * k * f2 / (2.0 * n) : (k - 1.0) * k * f2 / (2.0 * n);
    }
    case BoundRisk::estimation_l2: {
      const auto [pi_class, c] = class_param(q);
      (void)pi_class;
      return lower ? (1.0 - c) * (1.0 - c) * (1.0 - 1.0 / (k - 1.0)) / (n * c)
                   : (1.0 - 1.0 / k) / (n * c);
    }
    case BoundRisk::estimation_l2_weighted: {
      const auto [pi_class, c] = class_param(q);
      if (!lower || !pi_class) return (k - 1.0) / n;
      return (1.0 - c) * (1.0 - c) * (k - k / (k - 1.0)) / n;
    }
  }
  throw ValidationError("bound: unknown risk");
}

std::uint64_t c_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("c_delta: delta must lie in (0, 1)");
  const double x = -std::log(4.0) / std::log1p(-delta) + 1.0;
  // Snap values that are integers up to round-off, e.g. delta = 0.5.
  const double r = std::round(x);
  const double c = std::abs(x - r) <= 1e-9 * std::max(1.0, r) ? r : std::ceil(x);
  return static_cast<std::uint64_t>(c);
}

double concentration_tail(std::uint64_t n, double delta, double t) {
  if (!(t >= 0.0)) throw ValidationError("concentration_tail: t must be nonnegative");
  if (n < 1) throw ValidationError("concentration_tail: n must be at least 1");
  const double c = static_cast<double>(c_delta(delta));
  const double m = static_cast<double>(n - 1);
  const double exponent = -(t * t / c) / (4.0 * (m + 2.0 * c) + 40.0 * t);
  return std::min(1.0, std::sqrt(2.0 / delta) * std::exp(exponent));
}

double moment_bound(std::uint64_t m, std::uint64_t n, double delta) {
  if (m < 1) throw ValidationError("moment_bound: m must be at least 1");
  if (n < 1) throw ValidationError("moment_bound: n must be at least 1");
  const double md = static_cast<double>(m);
  const double c = static_cast<double>(c_delta(delta));
  const double base = 4.0 * c * (11.0 * static_cast<double>(n - 1) + 2.0 * c);
  // Log space keeps large m from overflowing early.
  const double log_b = std::log(md) + std::lgamma(md / 2.0) - 0.5 * std::log(2.0 * delta) +
                       0.5 * md * std::log(base);
  return std::exp(log_b);
}

double binomial_tail(std::uint64_t m, double p, double epsilon) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("binomial_tail: p must lie in [0, 1]");
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ValidationError("binomial_tail: epsilon must lie in (0, 1)");
  }
  return std::exp(-epsilon * epsilon * static_cast<double>(m) * p / 3.0);
}

double mixing_envelope(double delta, std::uint64_t t) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw ValidationError("mixing_envelope: bad delta");
  if (t < 1) throw ValidationError("mixing_envelope: t must be at least 1");
  return 2.0 * std::pow(1.0 - delta, static_cast<double>(t - 1));
}

}  // namespace mkrisk
