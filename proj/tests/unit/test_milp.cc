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
#include <cmath>
#include <random>
#include <regex>
#include <sstream>

#include <gtest/gtest.h>

#include "glimps/errors.h"
#include "glimps/milp.h"
#include "oracles.h"

namespace glimps {
namespace {

Matrix example_u() { return Matrix::from_rows({{1, 0}, {3, 2}, {5, 4}, {7, 6}, {9, 8}}); }
Vector example_x() { return Vector::from_list({4, 14, 0, 34, 44}); }

MilpProblem problem(const Eigen::MatrixXd& u, const Eigen::VectorXd& x, double big_m,
                    double lambda = kNoiseless) {
  MilpProblem p;
  p.basis = Matrix(u);
  p.obs = Vector(x);
  p.big_m = big_m;
  p.lambda = lambda;
  return p;
}

// Feasibility invariants every returned solution must satisfy.
void expect_valid(const MilpProblem& p, const MilpSolution& s) {
  ASSERT_EQ(s.z.size(), static_cast<std::size_t>(p.obs.size()));
  ASSERT_EQ(s.theta.size(), p.basis.cols());
  ASSERT_EQ(s.w.size(), p.obs.size());
  double ones = 0.0;
  for (Eigen::Index i = 0; i < p.obs.size(); ++i) {
    const double res = p.obs[i] - p.basis.values().row(i).dot(s.theta.values()) - s.w[i];
    const bool out = s.z[static_cast<std::size_t>(i)] != 0;
    ones += out;
    EXPECT_LE(std::abs(res), (out ? p.big_m : 0.0) + 1e-7) << "coordinate " << i;
    if (p.noiseless()) EXPECT_EQ(s.w[i], 0.0);
  }
  if (p.noiseless()) {
    EXPECT_EQ(s.objective, ones);
  } else {
    EXPECT_NEAR(s.objective, ones + p.lambda * s.w.values().squaredNorm(), 1e-6);
  }
}

TEST(ChooseBigM, Examples) {
  EXPECT_DOUBLE_EQ(choose_big_m(example_u(), example_x(), Vector::from_list({4, 1}), 1.0), 24.0);
  EXPECT_DOUBLE_EQ(choose_big_m(example_u(), example_x(), Vector::from_list({4, 1}), 2.0), 48.0);
  const Vector exact(example_u().values() * Eigen::Vector2d(1, 2));
  EXPECT_DOUBLE_EQ(choose_big_m(example_u(), exact, Vector::from_list({1, 2}), 1.0), 1e-6);
  EXPECT_THROW(choose_big_m(example_u(), example_x(), Vector::from_list({4, 1}), 0.5),
               ConfigError);
}

TEST(BigMRelaxation, Shape) {
  const MilpProblem p = problem(example_u().values(), example_x().values(), 100.0);
  const auto lp = big_m_relaxation(p);
  EXPECT_EQ(lp.num_rows(), 10);
  EXPECT_EQ(lp.num_cols(), 7);
  EXPECT_TRUE(lp.objective.head(2).isZero());
  EXPECT_TRUE(lp.objective.tail(5).isOnes());
  const std::vector<std::int8_t> fixing = {-1, 0, 1, -1, -1};
  const auto pinned = big_m_relaxation(p, fixing);
  EXPECT_EQ(pinned.col_lower[3], 0.0);
  EXPECT_EQ(pinned.col_upper[3], 0.0);
  EXPECT_EQ(pinned.col_lower[4], 1.0);
  EXPECT_EQ(pinned.col_upper[2], 1.0);
}

TEST(AssignmentObjective, Basics) {
  const MilpProblem p = problem(example_u().values(), example_x().values(), 100.0);
  EXPECT_EQ(assignment_objective(p, {0, 0, 1, 0, 0}, Vector::from_list({4, 1})), 1.0);
  EXPECT_TRUE(std::isinf(assignment_objective(p, {0, 0, 0, 0, 0}, Vector::from_list({4, 1}))));
  MilpProblem small = p;
  small.big_m = 10.0;
  EXPECT_TRUE(std::isinf(assignment_objective(small, {0, 0, 1, 0, 0}, Vector::from_list({4, 1}))));
  const auto theta = refit_theta(p, {0, 0, 1, 0, 0});
  ASSERT_TRUE(theta);
  EXPECT_NEAR((*theta)[0], 4.0, 1e-12);
  EXPECT_NEAR((*theta)[1], 1.0, 1e-12);
  EXPECT_FALSE(refit_theta(p, {1, 1, 1, 1, 0}));
}

TEST(SolveNoiseless, ExampleOne) {
  const MilpProblem p = problem(example_u().values(), example_x().values(), 100.0);
  const MilpSolution s = solve_noiseless(p);
  EXPECT_EQ(s.status, SolveStatus::kOptimal);
  EXPECT_EQ(s.z, (Indicator{0, 0, 1, 0, 0}));
  EXPECT_EQ(s.objective, 1.0);
  EXPECT_NEAR(s.theta[0], 4.0, 1e-9);
  EXPECT_NEAR(s.theta[1], 1.0, 1e-9);
  EXPECT_EQ(s.inliers().one_based(), (std::vector<int>{1, 2, 4, 5}));
  expect_valid(p, s);
}

TEST(SolveNoiseless, AllInlier) {
  const auto inst = oracle::planted(20, 3, 0.0, 5);
  const MilpProblem p = problem(inst.u, inst.x, 1.0);
  const MilpSolution s = solve_noiseless(p);
  EXPECT_EQ(s.status, SolveStatus::kOptimal);
  EXPECT_EQ(s.objective, 0.0);
  EXPECT_LT((s.theta.values() - inst.theta).norm(), 1e-9);
}

TEST(SolveNoiseless, MatchesConsensusOracle) {
  int cases = 0;
  for (double frac : {0.2, 0.4, 0.6}) {
    for (std::uint64_t seed = 0; seed < 34; ++seed) {
      const auto inst = oracle::planted(15, 2, frac, 500 + seed);
      const MilpProblem p = problem(inst.u, inst.x, 1e4);
      const MilpSolution s = solve_noiseless(p);
      ASSERT_EQ(s.status, SolveStatus::kOptimal);
      EXPECT_EQ(s.objective, 15 - oracle::max_consensus(inst.u, inst.x, 1e-7))
          << "frac " << frac << " seed " << seed;
      expect_valid(p, s);
      EXPECT_GE(s.best_bound, s.objective - 1e-9);
      ++cases;
    }
  }
  EXPECT_EQ(cases, 102);
}

TEST(SolveNoiseless, OracleWithThreeColumns) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = oracle::planted(12, 3, 0.5, 900 + seed);
    const MilpProblem p = problem(inst.u, inst.x, 1e4);
    const MilpSolution s = solve_noiseless(p);
    ASSERT_EQ(s.status, SolveStatus::kOptimal);
    EXPECT_EQ(s.objective, 12 - oracle::max_consensus(inst.u, inst.x, 1e-7)) << seed;
  }
}

double best_completion(const MilpProblem& p, const std::vector<std::int8_t>& fixing) {
  return oracle::best_completion_2d(p.basis.values(), p.obs.values(), p.big_m, fixing);
}

TEST(SolveNoiseless, BoundSandwichAndMonotoneIncumbent) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto inst = oracle::planted(8, 2, 0.4, 1300 + seed);
    const MilpProblem p = problem(inst.u, inst.x, 8.0);
    std::vector<std::pair<std::vector<std::int8_t>, std::pair<double, double>>> events;
    std::vector<double> incumbents;
    SolverOptions opt;
    opt.lp_bound_depth = 100;
    opt.on_node = [&](const NodeEvent& e) {
      events.push_back({std::vector<std::int8_t>(e.fixing.begin(), e.fixing.end()),
                        {e.bound, e.lp_bound}});
    };
    opt.on_incumbent = [&](double obj, long) { incumbents.push_back(obj); };
    const MilpSolution s = solve_noiseless(p, opt);
    ASSERT_NE(s.status, SolveStatus::kFeasibleTimeLimit);
    ASSERT_FALSE(events.empty());
    for (const auto& [fixing, bounds] : events) {
      const double best = best_completion(p, fixing);
      if (!std::isfinite(best)) continue;
      EXPECT_LE(bounds.first, best + 1e-6) << "seed " << seed;
      if (!std::isnan(bounds.second)) EXPECT_LE(bounds.second, best + 1e-6) << "seed " << seed;
    }
    for (std::size_t k = 1; k < incumbents.size(); ++k) {
      EXPECT_LE(incumbents[k], incumbents[k - 1]);
    }
    if (s.status == SolveStatus::kOptimal) {
      EXPECT_EQ(s.objective, best_completion(p, std::vector<std::int8_t>(8, -1)));
    }
  }
}

TEST(SolveNoiseless, WarmStartDominance) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = oracle::planted(30, 3, 0.5, 1700 + seed);
    MilpProblem p = problem(inst.u, inst.x, 50.0);
    const Eigen::VectorXd theta0 = inst.u.colPivHouseholderQr().solve(inst.x);
    WarmStart ws{Indicator(30, 1), Vector(theta0)};
    ASSERT_TRUE(std::isfinite(assignment_objective(p, ws.z, ws.theta)));
    for (long limit : {0L, 50L, 500L}) {
      SolverOptions opt;
      opt.max_nodes = limit;
      const MilpSolution cold = solve_noiseless(p, opt);
      MilpProblem warm_p = p;
      warm_p.warm_start = ws;
      const MilpSolution warm = solve_noiseless(warm_p, opt);
      EXPECT_LE(warm.objective, assignment_objective(p, ws.z, ws.theta));
      if (limit == 0) EXPECT_LE(warm.objective, cold.objective);
      expect_valid(p, warm);
    }
  }
}

TEST(SolveNoiseless, NodeLimitAndTimeLimit) {
  const auto inst = oracle::planted(80, 4, 0.85, 77);
  MilpProblem p = problem(inst.u, inst.x, 30.0);
  SolverOptions opt;
  opt.max_nodes = 1000;
  const MilpSolution limited = solve_noiseless(p, opt);
  EXPECT_EQ(limited.status, SolveStatus::kFeasibleTimeLimit);
  EXPECT_LE(limited.best_bound, limited.objective);
  expect_valid(p, limited);

  p.time_limit_s = 0.2;
  const MilpSolution timed = solve_noiseless(p);
  EXPECT_EQ(timed.status, SolveStatus::kFeasibleTimeLimit);
  EXPECT_LE(timed.wall_time_s, 0.2 * 1.1 + 0.05);
  EXPECT_LE(timed.best_bound, timed.objective);
  expect_valid(p, timed);
}

TEST(SolveNoiseless, LogLineFormat) {
  const auto inst = oracle::planted(25, 2, 0.5, 8);
  const MilpProblem p = problem(inst.u, inst.x, 100.0);
  std::ostringstream log;
  SolverOptions opt;
  opt.log = &log;
  opt.log_every = 10;
  solve_noiseless(p, opt);
  const std::regex line(R"(node=\d+ bound=\S+ incumbent=\S+ gap=\S+ t=\d+\.\d+)");
  std::istringstream in(log.str());
  int lines = 0;
  for (std::string l; std::getline(in, l);) {
    EXPECT_TRUE(std::regex_match(l, line)) << l;
    ++lines;
  }
  EXPECT_GT(lines, 0);
}

TEST(SolveNoiseless, InfeasibleAndEscalation) {
  const MilpProblem tiny = problem(example_u().values(), example_x().values(), 1e-3);
  EXPECT_EQ(solve_noiseless(tiny).status, SolveStatus::kInfeasible);

  const MilpProblem small = problem(example_u().values(), example_x().values(), 15.0);
  const MilpSolution direct = solve_noiseless(small);
  ASSERT_NE(direct.status, SolveStatus::kInfeasible);
  EXPECT_GT(direct.objective, 1.0);

  const EscalationResult esc = solve_with_escalation(small);
  EXPECT_GE(esc.escalations, 1);
  EXPECT_GE(esc.big_m, 24.0);
  EXPECT_EQ(esc.solution.z, (Indicator{0, 0, 1, 0, 0}));
  MilpProblem doubled = small;
  doubled.big_m = 2.0 * esc.big_m;
  EXPECT_EQ(solve_noiseless(doubled).objective, esc.solution.objective);
}

TEST(SolveNoiseless, RejectsBadProblems) {
  MilpProblem p = problem(example_u().values(), example_x().values(), 100.0);
  p.warm_start = WarmStart{Indicator{0, 0, 0, 0, 0}, Vector::from_list({4, 1})};
  EXPECT_THROW(solve_noiseless(p), ConfigError);
  p.warm_start.reset();
  p.big_m = 0.0;
  EXPECT_THROW(solve_noiseless(p), ConfigError);
  MilpProblem noisy = problem(example_u().values(), example_x().values(), 100.0, 10.0);
  EXPECT_THROW(solve_noiseless(noisy), ConfigError);
  MilpProblem mismatch = p;
  mismatch.big_m = 1.0;
  mismatch.obs = Vector::from_list({1, 2, 3});
  EXPECT_THROW(solve_noiseless(mismatch), DomainError);
}

TEST(SolveNoisy, HugeLambdaMatchesNoiseless) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto inst = oracle::planted(14, 2, 0.4, 2100 + seed);
    const MilpSolution exact = solve_noiseless(problem(inst.u, inst.x, 1e3));
    const MilpProblem p = problem(inst.u, inst.x, 1e3, 1e12);
    const MilpSolution noisy = solve_noisy(p);
    EXPECT_EQ(noisy.z, exact.z) << "seed " << seed;
    expect_valid(p, noisy);
  }
}

TEST(SolveNoisy, ZeroLambdaTreatsEverythingAsInlier) {
  const MilpProblem p = problem(example_u().values(), example_x().values(), 100.0, 0.0);
  const MilpSolution s = solve_noisy(p);
  EXPECT_EQ(s.status, SolveStatus::kOptimal);
  EXPECT_EQ(s.z, Indicator(5, 0));
  EXPECT_EQ(s.objective, 0.0);
  const Eigen::VectorXd w = example_x().values() - example_u().values() * s.theta.values();
  EXPECT_LT((s.w.values() - w).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SolveNoisy, BeatsGroundTruthLabeling) {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> n01;
  int wins = 0;
  for (int trial = 0; trial < 50; ++trial) {
    auto inst = oracle::planted(20, 2, 0.3, 3000 + static_cast<std::uint64_t>(trial));
    for (Eigen::Index i = 0; i < 20; ++i) {
      if (!inst.outlier[static_cast<std::size_t>(i)]) inst.x[i] += 1e-3 * n01(rng);
    }
    const double lambda = 1000.0;
    // Objective at the true labeling with theta refit on the true inliers.
    std::vector<int> in;
    for (int i = 0; i < 20; ++i) {
      if (!inst.outlier[static_cast<std::size_t>(i)]) in.push_back(i);
    }
    const Eigen::MatrixXd ui = oracle::rows_of(inst.u, in);
    const Eigen::VectorXd xi = oracle::rows_of(inst.x, in);
    const Eigen::VectorXd th = (ui.transpose() * ui).inverse() * (ui.transpose() * xi);
    const double truth = static_cast<double>(20 - in.size()) + lambda * (xi - ui * th).squaredNorm();
    const double big_m = 2.0 * (inst.x - inst.u * th).cwiseAbs().maxCoeff();

    const MilpProblem p = problem(inst.u, inst.x, big_m, lambda);
    const MilpSolution s = solve_noisy(p);
    expect_valid(p, s);
    wins += s.objective <= truth + 1e-9;
  }
  EXPECT_EQ(wins, 50);
}

TEST(SolveNoisy, NeverInfeasible) {
  const MilpProblem p = problem(example_u().values(), example_x().values(), 1e-3, 1000.0);
  const MilpSolution s = solve_noisy(p);
  EXPECT_NE(s.status, SolveStatus::kInfeasible);
  expect_valid(p, s);
}

}  // namespace
}  // namespace glimps
