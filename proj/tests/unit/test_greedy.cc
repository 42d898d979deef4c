// Copyright 2026 The GLIMPS Authors.
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

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "glimps/errors.h"
#include "glimps/greedy.h"
#include "glimps/synth.h"
#include "oracles.h"

namespace glimps {
namespace {

Matrix example_u() { return Matrix::from_rows({{1, 0}, {3, 2}, {5, 4}, {7, 6}, {9, 8}}); }
Vector example_x() { return Vector::from_list({4, 14, 0, 34, 44}); }

TEST(BestRemoval, ExampleOneMatchesOracle) {
  const auto [idx, ratio] = oracle::best_removal(example_u().values(), example_x().values(),
                                                 {0, 1, 2, 3, 4});
  const Removal got = best_removal(example_u(), example_x(), IndexSet::range(5));
  EXPECT_EQ(got.index, idx);
  EXPECT_EQ(got.index + 1, 3);
  EXPECT_NEAR(got.ratio, 1.0, 1e-12);
  EXPECT_NEAR(got.ratio, ratio, 1e-10);
}

TEST(BestRemoval, AllInlierTiesGoToSmallestIndex) {
  const Matrix u = example_u();
  const Vector x(u.values() * Eigen::Vector2d(4, 1));
  const Removal got = best_removal(u, x, IndexSet::range(5));
  EXPECT_EQ(got.index, 0);
  EXPECT_NEAR(got.ratio, 1.0, 1e-12);
}

TEST(BestRemoval, SingleGrossOutlier) {
  const Matrix u(Eigen::MatrixXd::Ones(6, 1));
  const Vector x = Vector::from_list({1, 1, 1, 1, 1, 100});
  const Removal got = best_removal(u, x, IndexSet::range(6));
  EXPECT_EQ(got.index + 1, 6);
  EXPECT_NEAR(got.ratio, 1.0, 1e-12);
  // Direct ratio of the survivors {1..5}.
  EXPECT_NEAR(oracle::gram_ratio(Eigen::MatrixXd::Ones(5, 1), Eigen::VectorXd::Ones(5)), 1.0,
              1e-12);
}

TEST(BestRemoval, ZeroRestrictionCountsAsRatioOne) {
  const Matrix u = Matrix::from_rows({{1}, {1}, {1}});
  const Vector x = Vector::from_list({0, 0, 5});
  const Removal got = best_removal(u, x, IndexSet::range(3));
  EXPECT_EQ(got.index, 2);
  EXPECT_EQ(got.ratio, 1.0);
}

TEST(BestRemoval, Errors) {
  EXPECT_THROW(best_removal(example_u(), example_x(), IndexSet::from_zero_based({0, 1, 2})),
               ConfigError);
  const Matrix degenerate = Matrix::from_rows({{1, 0}, {2, 0}, {3, 0}, {4, 0}});
  EXPECT_THROW(best_removal(degenerate, Vector::from_list({1, 2, 3, 5}), IndexSet::range(4)),
               DegenerateActiveSetError);
}

TEST(GreedyErase, ExampleOneSingleStep) {
  GreedyConfig cfg;
  cfg.removal_fraction = 0.2;
  const GreedyResult res = greedy_erase(example_u(), example_x(), cfg);
  EXPECT_EQ(res.survivors.one_based(), (std::vector<int>{1, 2, 4, 5}));
  ASSERT_EQ(res.trace.steps.size(), 1u);
  EXPECT_EQ(res.trace.steps[0].removed_index + 1, 3);
  EXPECT_EQ(res.trace.steps[0].active_count_before, 5);
}

TEST(GreedyErase, ZeroFractionKeepsEverything) {
  GreedyConfig cfg;
  cfg.removal_fraction = 0.0;
  const GreedyResult res = greedy_erase(example_u(), example_x(), cfg);
  EXPECT_EQ(res.survivors, IndexSet::range(5));
  EXPECT_TRUE(res.trace.steps.empty());
  EXPECT_EQ(res.trace.projection_calls, 0);
}

TEST(GreedyErase, RemovalCountIsFloorOfFractionTimesD) {
  EXPECT_EQ(removal_count_for(0.4, 100), 40);
  EXPECT_EQ(removal_count_for(0.3, 100), 30);
  EXPECT_EQ(removal_count_for(0.2, 5), 1);
  EXPECT_EQ(removal_count_for(0.39, 10), 3);
  EXPECT_THROW(removal_count_for(1.0, 10), ConfigError);
  EXPECT_THROW(removal_count_for(-0.1, 10), ConfigError);
}

TEST(GreedyErase, SurvivorFloor) {
  GreedyConfig cfg;
  cfg.removal_fraction = 0.6;  // would leave 2 < r + 1
  EXPECT_THROW(greedy_erase(example_u(), example_x(), cfg), ConfigError);
  cfg.removal_fraction = 0.2;
  cfg.min_survivors = 5;
  EXPECT_THROW(greedy_erase(example_u(), example_x(), cfg), ConfigError);
}

TEST(GreedyErase, FollowsOracleStepByStep) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto inst = oracle::planted(12, 2, 0.4, seed);
    const GreedyResult res = greedy_erase_count(Matrix(inst.u), Vector(inst.x), 6);
    std::vector<int> active(12);
    std::iota(active.begin(), active.end(), 0);
    for (const auto& step : res.trace.steps) {
      const auto [idx, ratio] = oracle::best_removal(inst.u, inst.x, active);
      ASSERT_EQ(step.removed_index, idx) << "seed " << seed;
      EXPECT_NEAR(step.ratio, ratio, 1e-9);
      active.erase(std::find(active.begin(), active.end(), idx));
    }
  }
}

TEST(GreedyErase, TraceInvariantsAndCallCount) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance inst = generate({40, 3, 0.5, 0.0, seed});
    const int c = 15;
    const GreedyResult res = greedy_erase_count(inst.u, inst.x, c);
    ASSERT_EQ(static_cast<int>(res.trace.steps.size()), c);
    std::set<int> removed;
    long expected_calls = 0;
    for (int k = 0; k < c; ++k) {
      const auto& step = res.trace.steps[static_cast<std::size_t>(k)];
      EXPECT_LE(step.ratio, 1.0 + 1e-12);
      EXPECT_GE(step.ratio, 0.0);
      EXPECT_EQ(step.active_count_before, 40 - k);
      EXPECT_TRUE(removed.insert(step.removed_index).second);
      expected_calls += 40 - k;
    }
    EXPECT_EQ(res.trace.projection_calls, expected_calls);
    EXPECT_EQ(static_cast<int>(res.survivors.size()), 40 - c);
    for (int i : res.survivors) EXPECT_EQ(removed.count(i), 0u);
  }
}

TEST(GreedyErase, PermutationEquivariance) {
  std::mt19937_64 rng(3);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = oracle::planted(20, 3, 0.4, seed + 100);
    std::vector<int> perm(20);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const Eigen::MatrixXd pu = oracle::rows_of(inst.u, perm);
    const Eigen::VectorXd px = oracle::rows_of(inst.x, perm);

    const GreedyResult a = greedy_erase_count(Matrix(inst.u), Vector(inst.x), 8);
    const GreedyResult b = greedy_erase_count(Matrix(pu), Vector(px), 8);
    // Once the survivors fit exactly every candidate ties and the pick
    // depends on the index order; compare the steps before that.
    std::vector<int> ra;
    std::vector<int> rb;
    for (std::size_t k = 0; k < a.trace.steps.size(); ++k) {
      if (a.trace.steps[k].ratio > 1.0 - 1e-9) break;
      ra.push_back(a.trace.steps[k].removed_index);
      rb.push_back(perm[static_cast<std::size_t>(b.trace.steps[k].removed_index)]);
    }
    EXPECT_EQ(ra, rb) << "seed " << seed;
    EXPECT_FALSE(ra.empty());
  }
}

TEST(GreedyErase, RemovesOutliersAtHalfCorruption) {
  int clean = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Instance inst = generate({100, 5, 0.5, 0.0, 1000 + seed});
    GreedyConfig cfg;
    cfg.removal_fraction = 0.4;
    const GreedyResult res = greedy_erase(inst.u, inst.x, cfg);
    ASSERT_EQ(res.trace.steps.size(), 40u);
    const bool all_outliers = std::all_of(res.trace.steps.begin(), res.trace.steps.end(),
                                          [&](const GreedyStep& s) {
                                            return inst.outlier_mask[static_cast<std::size_t>(
                                                       s.removed_index)] == 1;
                                          });
    clean += all_outliers;
  }
  EXPECT_GE(clean, 45);
}

TEST(GreedyErase, TraceCsv) {
  GreedyConfig cfg;
  cfg.removal_fraction = 0.2;
  const GreedyResult res = greedy_erase(example_u(), example_x(), cfg);
  std::ostringstream out;
  write_trace_csv(res.trace, out);
  const std::string text = out.str();
  const std::string head = "step,removed_index,ratio\n1,3,";
  ASSERT_EQ(text.substr(0, head.size()), head);
  EXPECT_NEAR(std::stod(text.substr(head.size())), 1.0, 1e-12);
}

}  // namespace
}  // namespace glimps
