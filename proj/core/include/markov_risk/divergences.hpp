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

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "markov_risk/markov_core.hpp"

namespace mkrisk {

enum class LossKind { f_divergence, l2, l1, linf };

/// A loss between two distributions: either an f-divergence
/// D_f(p, q) = sum_i q(i) f(p(i) / q(i)) with convex f, f(1) = 0, or one of
/// the norm-based losses (squared L2, L1, L-infinity).
///
/// For f-divergences the object also carries f'(1) and the asymptotic slope
/// lim f(x)/x. Evaluation sums the tilted terms q [f(x) - f'(1)(x - 1)], which
/// give the same total on the simplex but are individually nonnegative, and
/// uses p(i) * (slope - f'(1)) when q(i) = 0 < p(i).
class DivergenceSpec {
 public:
  using Generator = std::function<double(double)>;

  /// Custom f-divergence. `slope` is f'(1); when omitted it is estimated by a
  /// central difference. `growth` is lim_{x->inf} f(x)/x (+inf by default).
  /// Throws ValidationError when |f(1)| > 1e-12.
  static DivergenceSpec custom(std::string name, Generator f, double curvature,
                               std::optional<double> slope = std::nullopt,
                               double growth = std::numeric_limits<double>::infinity());

  static DivergenceSpec kl();
  static DivergenceSpec chi_squared();
  static DivergenceSpec hellinger();
  /// f(x) = 4 (1 - x^{(1+alpha)/2}) / (1 - alpha^2); alpha != +-1.
  static DivergenceSpec alpha(double alpha);
  static DivergenceSpec l2();
  static DivergenceSpec l1();
  static DivergenceSpec linf();

  /// Lowercase token used in CLI flags and CSV files.
  const std::string& name() const { return name_; }
  LossKind kind() const { return kind_; }
  bool is_f_divergence() const { return kind_ == LossKind::f_divergence; }

  /// f''(1); empty for the norm-based losses.
  std::optional<double> curvature() const { return curvature_; }

  /// f(x). Only valid for f-divergences.
  double generator(double x) const;

  /// Loss between p and q; may be +inf.
  double evaluate(std::span<const double> p, std::span<const double> q) const;

 private:
  DivergenceSpec() = default;

  std::string name_;
  LossKind kind_ = LossKind::f_divergence;
  Generator f_;
  Generator tilted_;  // f(x) - f'(1)(x - 1), when a better-conditioned form exists
  std::optional<double> curvature_;
  double slope_ = 0.0;
  double growth_ = 0.0;
};

/// Parses kl, chi2, hellinger, alpha(<a>), l2, l1, linf (case-insensitive).
DivergenceSpec builtin(std::string_view token);

double evaluate(const DivergenceSpec& spec, const Distribution& p, const Distribution& q);

/// Central second difference (f(1+h) - 2 f(1) + f(1-h)) / h^2.
double curvature_check(const DivergenceSpec& spec, double h = 1e-4);

}  // namespace mkrisk
