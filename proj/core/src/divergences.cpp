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

#include "markov_risk/divergences.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "markov_risk/errors.hpp"

namespace mkrisk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double parse_real(std::string_view text) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ValidationError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

// Accepts "0.5" or a ratio such as "1/3".
double parse_ratio(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_real(text);
  const double den = parse_real(text.substr(slash + 1));
  if (den == 0.0) throw ValidationError("zero denominator in '" + std::string(text) + "'");
  return parse_real(text.substr(0, slash)) / den;
}

}  // namespace

DivergenceSpec DivergenceSpec::custom(std::string name, Generator f, double curvature,
                                      std::optional<double> slope, double growth) {
  if (!f) throw ValidationError("divergence generator is empty");
  if (std::abs(f(1.0)) > 1e-12) {
    throw ValidationError("divergence generator must satisfy f(1) = 0");
  }
  DivergenceSpec spec;
  spec.name_ = std::move(name);
  spec.kind_ = LossKind::f_divergence;
  spec.curvature_ = curvature;
  if (slope) {
    spec.slope_ = *slope;
  } else {
    constexpr double h = 1e-6;
    spec.slope_ = (f(1.0 + h) - f(1.0 - h)) / (2.0 * h);
  }
  spec.growth_ = growth;
  spec.f_ = std::move(f);
  const double fd = curvature_check(spec);
  if (std::abs(fd - curvature) > 1e-6 * std::max(1.0, std::abs(curvature))) {
    throw ValidationError("declared curvature " + std::to_string(curvature) +
                          " disagrees with finite-difference estimate " + std::to_string(fd));
  }
  return spec;
}

DivergenceSpec DivergenceSpec::kl() {
  auto spec = custom(
      "kl", [](double x) { return x == 0.0 ? 0.0 : x * std::log(x); }, 1.0, 1.0, kInf);
  spec.tilted_ = [](double x) {
    if (x == 0.0) return 1.0;
    const double d = x - 1.0;
    return x * std::log1p(d) - d;
  };
  return spec;
}

DivergenceSpec DivergenceSpec::chi_squared() {
  return custom(
      "chi2", [](double x) { return (x - 1.0) * (x - 1.0); }, 2.0, 0.0, kInf);
}

DivergenceSpec DivergenceSpec::hellinger() {
  return custom(
      "hellinger",
      [](double x) {
        const double r = std::sqrt(x) - 1.0;
        return r * r;
      },
      0.5, 0.0, 1.0);
}

DivergenceSpec DivergenceSpec::alpha(double a) {
  if (!std::isfinite(a) || a == 1.0 || a == -1.0) {
    throw ValidationError("alpha-divergence requires alpha != +-1");
  }
  const double c = (1.0 + a) / 2.0;
  const double scale = 4.0 / (1.0 - a * a);
  // lim f(x)/x: 0 when the exponent is below one, +inf above (scale < 0 there).
  const double growth = c < 1.0 ? 0.0 : kInf;
  char label[48];
  std::snprintf(label, sizeof label, "alpha(%.2f)", a);
  auto spec = custom(
      label,
      [c, scale](double x) { return scale * (1.0 - std::pow(x, c)); }, 1.0, -2.0 / (1.0 - a),
      growth);
  spec.tilted_ = [a, c, scale](double x) {
    // f(0) - f'(1) * (0 - 1); x^c blows up at 0 when c < 0.
    if (x == 0.0) return c > 0.0 ? scale - 2.0 / (1.0 - a) : kInf;
    const double d = x - 1.0;
    return scale * (-std::expm1(c * std::log1p(d)) + c * d);
  };
  return spec;
}

DivergenceSpec DivergenceSpec::l2() {
  DivergenceSpec spec;
  spec.name_ = "l2";
  spec.kind_ = LossKind::l2;
  return spec;
}

DivergenceSpec DivergenceSpec::l1() {
  DivergenceSpec spec;
  spec.name_ = "l1";
  spec.kind_ = LossKind::l1;
  return spec;
}

DivergenceSpec DivergenceSpec::linf() {
  DivergenceSpec spec;
  spec.name_ = "linf";
  spec.kind_ = LossKind::linf;
  return spec;
}

double DivergenceSpec::generator(double x) const {
  if (!is_f_divergence()) throw ValidationError(name_ + " is not an f-divergence");
  return f_(x);
}

double DivergenceSpec::evaluate(std::span<const double> p, std::span<const double> q) const {
  if (p.size() != q.size()) {
    throw ValidationError("divergence " + name_ + ": dimension mismatch (" +
                          std::to_string(p.size()) + " vs " + std::to_string(q.size()) + ")");
  }
  double total = 0.0;
  switch (kind_) {
    case LossKind::l2:
      for (std::size_t i = 0; i < p.size(); ++i) total += (p[i] - q[i]) * (p[i] - q[i]);
      return total;
    case LossKind::l1:
      for (std::size_t i = 0; i < p.size(); ++i) total += std::abs(p[i] - q[i]);
      return total;
    case LossKind::linf:
      for (std::size_t i = 0; i < p.size(); ++i) total = std::max(total, std::abs(p[i] - q[i]));
      return total;
    case LossKind::f_divergence:
      break;
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (q[i] == 0.0) {
      if (p[i] == 0.0) continue;
      const double rate = growth_ - slope_;
      if (std::isinf(rate)) return kInf;
      total += p[i] * rate;
      continue;
    }
    const double x = p[i] / q[i];
    const double g = tilted_ ? tilted_(x) : f_(x) - slope_ * (x - 1.0);
    if (std::isinf(g)) return kInf;
    total += q[i] * std::max(0.0, g);
  }
  return total;
}

DivergenceSpec builtin(std::string_view token) {
  std::string t(token);
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t == "kl") return DivergenceSpec::kl();
  if (t == "chi2" || t == "chisquared") return DivergenceSpec::chi_squared();
  if (t == "hellinger") return DivergenceSpec::hellinger();
  if (t == "l2") return DivergenceSpec::l2();
  if (t == "l1") return DivergenceSpec::l1();
  if (t == "linf") return DivergenceSpec::linf();
  if (t.starts_with("alpha(") && t.ends_with(")")) {
    return DivergenceSpec::alpha(parse_ratio(std::string_view(t).substr(6, t.size() - 7)));
  }
  throw ValidationError("unknown divergence '" + std::string(token) +
                        "' (expected kl, chi2, hellinger, alpha(<a>), l2, l1, linf)");
}

double evaluate(const DivergenceSpec& spec, const Distribution& p, const Distribution& q) {
  return spec.evaluate(p.probs(), q.probs());
}

double curvature_check(const DivergenceSpec& spec, double h) {
  return (spec.generator(1.0 + h) - 2.0 * spec.generator(1.0) + spec.generator(1.0 - h)) /
         (h * h);
}

}  // namespace mkrisk
