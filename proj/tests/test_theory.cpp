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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "markov_risk/errors.hpp"
#include "markov_risk/markov_core.hpp"
#include "markov_risk/theory.hpp"
#include "test_support.hpp"

using namespace mkrisk;

namespace {

BoundQuery query(BoundRisk risk, BoundSide side, std::uint64_t k, std::uint64_t n) {
  BoundQuery q;
  q.risk = risk;
  q.side = side;
  q.k = k;
  q.n = n;
  return q;
}

constexpr BoundRisk kAllRisks[] = {BoundRisk::prediction_kl,         BoundRisk::estimation_f,
                                   BoundRisk::estimation_f_weighted, BoundRisk::estimation_l2,
                                   BoundRisk::estimation_l2_weighted, BoundRisk::iid_kl};

}  // namespace

TEST(Bound, PredictionAtReferencePoint) {
  const double lln = std::log(std::log(1e5));
  EXPECT_NEAR(lln, 2.44347, 1e-5);
  const double hi = bound(query(BoundRisk::prediction_kl, BoundSide::upper, 6, 100'000));
  const double lo = bound(query(BoundRisk::prediction_kl, BoundSide::lower, 6, 100'000));
  EXPECT_NEAR(hi, 72.0 * lln / 1e5, 1e-18);
  EXPECT_NEAR(hi / 1.7593e-3, 1.0, 1e-4);
  EXPECT_NEAR(lo, 5.0 * lln / (4.0 * std::numbers::e * 1e5), 1e-18);
  EXPECT_NEAR(lo / 1.1236e-5, 1.0, 1e-4);
}

TEST(Bound, EstimationDeltaClass) {
  auto q = query(BoundRisk::estimation_f, BoundSide::upper, 6, 100'000);
  q.delta = 0.05;
  EXPECT_NEAR(bound(q), 5e-4, 1e-18);
  q.side = BoundSide::lower;
  EXPECT_NEAR(bound(q), 0.95 * 4.0 / (2e5 * 0.05), 1e-18);
  q.curvature = 2.0;
  EXPECT_NEAR(bound(q), 2.0 * 0.95 * 4.0 / (2e5 * 0.05), 1e-18);
}

TEST(Bound, EstimationPiStarClass) {
  auto q = query(BoundRisk::estimation_f, BoundSide::upper, 6, 100'000);
  q.pi_star = 0.1;
  q.delta = 0.05;  // pi* takes precedence
  EXPECT_NEAR(bound(q), 5.0 / (2e5 * 0.1), 1e-18);
  q.risk = BoundRisk::estimation_f_weighted;
  q.side = BoundSide::lower;
  EXPECT_NEAR(bound(q), 0.9 * 4.0 * 6.0 / 2e5, 1e-18);
  q.risk = BoundRisk::estimation_l2_weighted;
  EXPECT_NEAR(bound(q), 0.81 * (6.0 - 6.0 / 5.0) / 1e5, 1e-18);
  q.risk = BoundRisk::estimation_l2;
  EXPECT_NEAR(bound(q), 0.81 * (1.0 - 1.0 / 5.0) / (1e5 * 0.1), 1e-18);
}

TEST(Bound, WeightedAndBaselineValues) {
  auto q = query(BoundRisk::estimation_l2_weighted, BoundSide::upper, 6, 100'000);
  q.delta = 0.05;
  EXPECT_NEAR(bound(q), 5e-5, 1e-18);
  q.risk = BoundRisk::estimation_f_weighted;
  EXPECT_NEAR(bound(q), 30.0 / 2e5, 1e-18);
  q.risk = BoundRisk::estimation_l2;
  EXPECT_NEAR(bound(q), (1.0 - 1.0 / 6.0) / (1e5 * 0.05), 1e-18);
  EXPECT_NEAR(bound(query(BoundRisk::iid_kl, BoundSide::upper, 6, 100'000)), 2.5e-5, 1e-18);
}

TEST(Bound, MissingClassParameter) {
  EXPECT_THROW(bound(query(BoundRisk::estimation_f, BoundSide::upper, 6, 1000)), ValidationError);
  EXPECT_THROW(bound(query(BoundRisk::estimation_l2_weighted, BoundSide::lower, 6, 1000)),
               ValidationError);
}

TEST(Bound, QueryInvariants) {
  EXPECT_THROW(bound(query(BoundRisk::iid_kl, BoundSide::upper, 1, 1000)), ValidationError);
  EXPECT_THROW(bound(query(BoundRisk::iid_kl, BoundSide::upper, 4, 2)), ValidationError);
  auto q = query(BoundRisk::estimation_f, BoundSide::upper, 4, 1000);
  q.delta = 0.25;
  EXPECT_THROW(bound(q), ValidationError);
  q.delta.reset();
  q.pi_star = 0.3;
  EXPECT_THROW(bound(q), ValidationError);
  q.pi_star = 0.25;
  EXPECT_NO_THROW(bound(q));
}

TEST(Bound, PositiveDecreasingInNIncreasingInK) {
  for (auto risk : kAllRisks) {
    for (auto side : {BoundSide::lower, BoundSide::upper}) {
      for (std::uint64_t k = 3; k <= 36; ++k) {
        double prev = INFINITY;
        for (std::uint64_t n = 1000; n <= 1'000'000; n *= 10) {
          auto q = query(risk, side, k, n);
          q.delta = 0.01;
          q.pi_star = 0.02;
          const double b = bound(q);
          ASSERT_GT(b, 0.0);
          ASSERT_LT(b, prev);
          prev = b;
          if (k > 3) {
            auto smaller = q;
            smaller.k = k - 1;
            ASSERT_GT(b, bound(smaller)) << to_string(risk) << ' ' << to_string(side) << " k=" << k;
          }
        }
      }
    }
  }
}

TEST(Bound, UpperDominatesLower) {
  for (auto risk : kAllRisks) {
    for (std::uint64_t k = 2; k <= 36; ++k) {
      for (std::uint64_t n = 1000; n <= 1'000'000; n *= 10) {
        for (bool pi_class : {false, true}) {
          auto q = query(risk, BoundSide::upper, k, n);
          if (pi_class) {
            q.pi_star = 0.5 / static_cast<double>(k);
          } else {
            q.delta = 0.5 / static_cast<double>(k);
          }
          const double hi = bound(q);
          q.side = BoundSide::lower;
          ASSERT_GE(hi, bound(q)) << to_string(risk) << " k=" << k << " n=" << n;
        }
      }
    }
  }
}

TEST(Bound, Tokens) {
  for (auto risk : kAllRisks) EXPECT_EQ(parse_bound_risk(to_string(risk)), risk);
  EXPECT_EQ(parse_bound_side("lower"), BoundSide::lower);
  EXPECT_THROW(parse_bound_side("middle"), ValidationError);
  EXPECT_THROW(parse_bound_risk("prediction"), ValidationError);
}

TEST(CDelta, ReferenceValues) {
  EXPECT_EQ(c_delta(0.5), 3u);
  EXPECT_EQ(c_delta(0.1), 15u);
  EXPECT_EQ(c_delta(0.75), 2u);
  EXPECT_THROW(c_delta(0.0), ValidationError);
  EXPECT_THROW(c_delta(1.0), ValidationError);
}

TEST(CDelta, NonIncreasingInDelta) {
  std::uint64_t prev = c_delta(0.01);
  for (int i = 2; i <= 50; ++i) {
    const auto c = c_delta(i / 100.0);
    EXPECT_LE(c, prev);
    prev = c;
  }
}

TEST(ConcentrationTail, VacuousAtZero) { EXPECT_EQ(concentration_tail(100, 0.5, 0.0), 1.0); }

TEST(ConcentrationTail, CappedReferencePoint) {
  // sqrt(2/0.5) exp(-(2500/3)/(4 (99 + 6) + 2000)) = 1.417 before the cap.
  const double raw = 2.0 * std::exp(-(2500.0 / 3.0) / (4.0 * 105.0 + 2000.0));
  // The quoted 1.41738 rounds exp(-0.34435) up; the exact value is 1.417358.
  EXPECT_NEAR(raw, 1.41738, 3e-5);
  EXPECT_EQ(concentration_tail(100, 0.5, 50.0), 1.0);
}

TEST(ConcentrationTail, UncappedValueAndRange) {
  const double t = 2000.0;
  const double c = 15.0;
  const double expected = std::sqrt(2.0 / 0.1) * std::exp(-(t * t / c) / (4.0 * (4999.0 + 30.0) + 40.0 * t));
  EXPECT_NEAR(concentration_tail(5000, 0.1, t), expected, 1e-15);
  for (double s = 0.0; s < 5000.0; s += 37.0) {
    const double b = concentration_tail(5000, 0.1, s);
    EXPECT_GE(b, 0.0);
    EXPECT_LE(b, 1.0);
  }
  EXPECT_THROW(concentration_tail(100, 0.1, -1.0), ValidationError);
}

TEST(MomentBound, ReferenceValue) {
  EXPECT_NEAR(moment_bound(2, 100, 0.5), 26280.0, 1e-8);
}

TEST(MomentBound, IncreasingInM) {
  double prev = 0.0;
  for (std::uint64_t m = 1; m <= 6; ++m) {
    const double b = moment_bound(m, 100, 0.5);
    EXPECT_GT(b, prev);
    prev = b;
  }
}

TEST(BinomialTail, ReferenceValues) {
  EXPECT_NEAR(binomial_tail(100, 0.5, 0.2), std::exp(-2.0 / 3.0), 1e-15);
  EXPECT_NEAR(binomial_tail(100, 0.5, 0.2), 0.51342, 1e-5);
  EXPECT_EQ(binomial_tail(100, 0.0, 0.5), 1.0);
  EXPECT_THROW(binomial_tail(10, 0.5, 1.0), ValidationError);
  EXPECT_THROW(binomial_tail(10, 1.5, 0.5), ValidationError);
}

TEST(BinomialTail, DominatesExactTail) {
  for (std::size_t m = 1; m <= 30; ++m) {
    for (double p : {0.05, 0.2, 0.5, 0.8, 0.95}) {
      for (double eps : {0.05, 0.3, 0.6, 0.95}) {
        const double exact = oracle::binomial_upper_tail(m, p, (1.0 + eps) * m * p);
        ASSERT_LE(exact, binomial_tail(m, p, eps) + 1e-15) << m << ' ' << p << ' ' << eps;
      }
    }
  }
}

TEST(ConcentrationTail, HoldsOnSimulatedCounts) {
  // Smaller version of the acceptance check.
  const std::size_t n = 2000;
  const double delta = 0.1;
  const auto chain = random_chain(4, delta, 3);
  const auto pi = stationary_distribution(chain.matrix());
  const int trials = 2000;
  std::vector<double> dev;
  for (int r = 0; r < trials; ++r) {
    const auto c = count_transitions(sample_sequence(chain, n, derive_seed(77, r)));
    for (State i = 0; i < 4; ++i) {
      dev.push_back(std::abs(static_cast<double>(c.from(i)) - (n - 1.0) * pi[i]));
    }
  }
  for (double t : {10.0, 50.0, 100.0, 200.0, 400.0}) {
    double freq = 0.0;
    for (double d : dev) freq += d > t;
    freq /= static_cast<double>(dev.size());
    EXPECT_LE(freq, concentration_tail(n, delta, t)) << t;
  }
  double second = 0.0;
  for (double d : dev) second += d * d / static_cast<double>(dev.size());
  EXPECT_LE(second, moment_bound(2, n, delta));
}

TEST(MixingEnvelope, Values) {
  EXPECT_EQ(mixing_envelope(0.1, 1), 2.0);
  EXPECT_NEAR(mixing_envelope(0.1, 3), 2.0 * 0.81, 1e-15);
  EXPECT_THROW(mixing_envelope(0.1, 0), ValidationError);
}
