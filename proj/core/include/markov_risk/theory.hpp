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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mkrisk {

enum class BoundSide { lower, upper };

/// Which risk a bound speaks about. The *_weighted variants are the
/// stationary-weighted estimation risks; iid_kl is the i.i.d. KL baseline.
enum class BoundRisk {
  prediction_kl,
  estimation_f,
  estimation_f_weighted,
  estimation_l2,
  estimation_l2_weighted,
  iid_kl,
};

std::string_view to_string(BoundSide side);
std::string_view to_string(BoundRisk risk);
BoundSide parse_bound_side(std::string_view token);
BoundRisk parse_bound_risk(std::string_view token);

struct BoundQuery {
  std::uint64_t k = 2;
  std::uint64_t n = 3;
  /// Lower bound on every transition probability (delta class).
  std::optional<double> delta;
  /// Minimum stationary probability (pi* class). Takes precedence over delta.
  std::optional<double> pi_star;
  /// f''(1) of the loss generator; ignored by L2 and KL-only bounds.
  double curvature = 1.0;
  BoundSide side = BoundSide::upper;
  BoundRisk risk = BoundRisk::estimation_f;
};

/// Closed-form minimax bound. ln ln n uses natural logs. Estimation bounds
/// need delta or pi_star; ValidationError otherwise.
double bound(const BoundQuery& q);

/// ceil(-ln 4 / ln(1 - delta) + 1). Requires 0 < delta < 1.
std::uint64_t c_delta(double delta);

/// Tail bound on |N_i - (n-1) pi_i| > t for delta-clamped chains, capped at 1.
double concentration_tail(std::uint64_t n, double delta, double t);

/// Bound on E|N_i - (n-1) pi_i|^m.
double moment_bound(std::uint64_t m, std::uint64_t n, double delta);

/// Chernoff-type bound on Pr(Y >= (1 + eps) m p) for Y ~ Bin(m, p).
double binomial_tail(std::uint64_t m, double p, double epsilon);

/// Total variation style mixing envelope 2 (1 - delta)^(t-1) on ||P^t - pi||_1.
double mixing_envelope(double delta, std::uint64_t t);

}  // namespace mkrisk
