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
#include <vector>

#include "markov_risk/errors.hpp"
#include "markov_risk/estimators.hpp"
#include "markov_risk/markov_core.hpp"
#include "markov_risk/rng.hpp"

using namespace mkrisk;

namespace {

TransitionCounts counts_of(std::vector<std::vector<std::uint64_t>> pairs) {
  return TransitionCounts(std::move(pairs));
}

SampleSequence seq(std::vector<std::size_t> one_based, std::size_t k) {
  return SampleSequence::from_one_based(one_based, k);
}

}  // namespace

TEST(AddBeta, NoDataGivesUniformRows) {
  const auto m = add_beta_matrix(counts_of({{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}), 1.0);
  for (State i = 0; i < 3; ++i) {
    for (State j = 0; j < 3; ++j) EXPECT_NEAR(m(i, j), 1.0 / 3.0, 1e-15);
  }
}

TEST(AddBeta, HandValue) {
  const auto m = add_beta_matrix(counts_of({{2, 0}, {0, 0}}), 0.5);
  EXPECT_NEAR(m(0, 0), 5.0 / 6.0, 1e-15);
  EXPECT_NEAR(m(0, 1), 1.0 / 6.0, 1e-15);
}

TEST(AddBeta, RejectsNonPositiveBeta) {
  EXPECT_THROW(add_beta_matrix(counts_of({{1, 0}, {0, 1}}), 0.0), ValidationError);
}

TEST(AddBeta, SmallBetaRecoversEmpirical) {
  const auto c = counts_of({{3, 1, 0}, {2, 2, 4}, {0, 0, 0}});
  const auto e = empirical_matrix(c);
  const auto b = add_beta_matrix(c, 1e-12);
  for (State i = 0; i < 2; ++i) {
    for (State j = 0; j < 3; ++j) EXPECT_NEAR(b(i, j), e(i, j), 1e-9);
  }
}

TEST(AddBeta, EntriesBoundedBelowOnFuzzedCounts) {
  Rng rng(5);
  for (int r = 0; r < 500; ++r) {
    const std::size_t k = 2 + r % 5;
    const double beta = 0.1 + rng.uniform();
    std::vector<std::vector<std::uint64_t>> pairs(k, std::vector<std::uint64_t>(k));
    for (auto& row : pairs) {
      for (auto& v : row) v = rng.next() % 20;
    }
    const TransitionCounts c(pairs);
    const auto m = add_beta_matrix(c, beta);
    for (State i = 0; i < k; ++i) {
      for (State j = 0; j < k; ++j) {
        ASSERT_GE(m(i, j), beta / (static_cast<double>(c.from(i)) + k * beta) * (1 - 1e-12));
      }
    }
  }
}

TEST(AddSqrt, HandValue) {
  const auto m = add_sqrt_matrix(counts_of({{3, 1}, {0, 0}}));
  EXPECT_NEAR(m(0, 0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(m(0, 1), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(m(1, 0), 0.5, 1e-15);
  EXPECT_NEAR(m(1, 1), 0.5, 1e-15);
}

TEST(AddSqrt, RowsSumToOneOnFuzzedCounts) {
  Rng rng(6);
  for (int r = 0; r < 500; ++r) {
    const std::size_t k = 2 + r % 6;
    std::vector<std::vector<std::uint64_t>> pairs(k, std::vector<std::uint64_t>(k));
    for (auto& row : pairs) {
      for (auto& v : row) v = rng.next() % 1000;
    }
    // Construction validates every row.
    ASSERT_NO_THROW(add_sqrt_matrix(TransitionCounts(pairs)));
  }
}

TEST(Empirical, AlternatingSequence) {
  const auto m = empirical_matrix(count_transitions(seq({1, 2, 1, 2}, 2)));
  EXPECT_EQ(m(0, 0), 0.0);
  EXPECT_EQ(m(0, 1), 1.0);
  EXPECT_EQ(m(1, 0), 1.0);
  EXPECT_EQ(m(1, 1), 0.0);
}

TEST(Empirical, UnseenStateIsUniform) {
  const auto m = empirical_matrix(count_transitions(seq({1, 1, 2}, 3)));
  for (State j = 0; j < 3; ++j) EXPECT_NEAR(m(2, j), 1.0 / 3.0, 1e-15);
}

TEST(TailRun, MemberWithRun) {
  const auto c = classify_tail_run(seq({3, 1, 3, 2, 2}, 3));
  EXPECT_TRUE(c.member);
  EXPECT_EQ(c.state, 1u);
  EXPECT_EQ(c.run_length, 2u);
}

TEST(TailRun, EarlierOccurrenceExcludes) {
  const auto c = classify_tail_run(seq({2, 1, 3, 2, 3}, 3));
  EXPECT_FALSE(c.member);
  EXPECT_EQ(c.state, 2u);
  EXPECT_EQ(c.run_length, 1u);
}

TEST(TailRun, WholeSequenceRunIsExcluded) {
  const auto c = classify_tail_run(seq({1, 1, 1}, 2));
  EXPECT_FALSE(c.member);
  EXPECT_EQ(c.run_length, 3u);
}

TEST(TailRun, ExamplesFromTheConstruction) {
  EXPECT_TRUE(classify_tail_run(seq({3, 1, 3, 2}, 3)).member);
  EXPECT_TRUE(classify_tail_run(seq({3, 1, 3, 2, 2}, 3)).member);
  EXPECT_FALSE(classify_tail_run(seq({2, 1, 3, 2, 3}, 3)).member);
}

TEST(TailRunPrediction, ShortRunUsesLogN) {
  const auto p = tail_run_prediction({true, 0, 4}, 100, 4);
  EXPECT_NEAR(p[0], 1.0 - 1.0 / (4.0 * std::log(100.0)), 1e-15);
  EXPECT_NEAR(p[0], 0.94571, 1e-5);
  for (State j = 1; j < 4; ++j) EXPECT_NEAR(p[j], 0.018096, 1e-6);
}

TEST(TailRunPrediction, LongRun) {
  const auto p = tail_run_prediction({true, 2, 60}, 100, 4);
  EXPECT_NEAR(p[2], 1.0 - 1.0 / 60.0, 1e-15);
}

TEST(TailRunPrediction, TieTakesFirstBranch) {
  const auto p = tail_run_prediction({true, 0, 50}, 100, 3);
  EXPECT_NEAR(p[0], 1.0 - 1.0 / (50.0 * std::log(100.0)), 1e-15);
}

TEST(TailRunPrediction, PositiveAndIncreasingInRunLength) {
  for (std::size_t n : {3u, 10u, 101u, 1000u}) {
    double prev = 0.0;
    for (std::size_t l = 1; l < n; ++l) {
      const auto p = tail_run_prediction({true, 0, l}, n, 5);
      for (double v : p.probs()) ASSERT_GT(v, 0.0);
      if (2 * l <= n) {
        ASSERT_GT(p[0], prev);
        prev = p[0];
      }
    }
  }
}

TEST(TailRunPrediction, RequiresMember) {
  EXPECT_THROW(tail_run_prediction({false, 0, 1}, 10, 3), ValidationError);
}

TEST(Hybrid, MemberUsesTailRunBranch) {
  const auto x = seq({1, 2, 2}, 2);
  const auto p = hybrid_predict(x);
  EXPECT_EQ(p, tail_run_prediction(classify_tail_run(x), 3, 2));
}

TEST(Hybrid, NonMemberUsesAddHalfRow) {
  const auto p = hybrid_predict(seq({1, 2, 1}, 2));
  EXPECT_NEAR(p[0], 0.25, 1e-15);
  EXPECT_NEAR(p[1], 0.75, 1e-15);
}

TEST(Hybrid, ConstantSequenceIsNotAMember) {
  const auto p = hybrid_predict(seq({1, 1, 1, 1}, 2));
  // Row 1 of add-1/2 with N_11 = 3: (3.5/4, 0.5/4).
  EXPECT_NEAR(p[0], 3.5 / 4.0, 1e-15);
}

TEST(Hybrid, RoutingIsExclusive) {
  Rng rng(8);
  for (int r = 0; r < 2000; ++r) {
    const std::size_t k = 2 + r % 4;
    const std::size_t n = 3 + r % 12;
    std::vector<State> s(n);
    for (auto& v : s) v = rng.next() % k;
    const SampleSequence x(s, k);
    const auto c = classify_tail_run(x);
    const auto p = hybrid_predict(x);
    if (c.member) {
      ASSERT_EQ(p, tail_run_prediction(c, n, k));
    } else {
      ASSERT_EQ(p, add_beta_matrix(count_transitions(x), 0.5).row(x.back()));
    }
  }
}

TEST(EstimatorSpec, ParseAndName) {
  EXPECT_EQ(parse_estimator("add(0.5)").name(), "add(0.5)");
  EXPECT_EQ(parse_estimator("add(1)").name(), "add(1)");
  EXPECT_EQ(parse_estimator("add-sqrt").name(), "add-sqrt");
  EXPECT_EQ(parse_estimator("empirical").name(), "empirical");
  EXPECT_TRUE(parse_estimator("hybrid").is_predictor_only());
  EXPECT_THROW(parse_estimator("add(0)"), ValidationError);
  EXPECT_THROW(parse_estimator("laplace"), ValidationError);
  EXPECT_THROW(make_matrix_estimator(parse_estimator("hybrid")), ValidationError);
}

TEST(EstimatorSpec, PredictorUsesLastRow) {
  const auto x = seq({1, 2, 2, 1, 2}, 2);
  const auto pred = make_predictor(parse_estimator("add(1)"))(x);
  EXPECT_EQ(pred, add_beta_matrix(count_transitions(x), 1.0).row(1));
}
