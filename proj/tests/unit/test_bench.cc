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
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "glimps/bench.h"
#include "glimps/errors.h"
#include "glimps/metrics.h"

namespace glimps {
namespace {

SweepSpec small_spec() {
  SweepSpec s = default_spec(SweepKind::kOutliers);
  s.d = 14;
  s.r = 2;
  s.p_grid = {0.2, 0.3};
  s.trials = 2;
  s.time_limit_s = 5.0;
  s.methods = {Method::kGreedyOnly, Method::kGlimps};
  s.workers = 1;
  return s;
}

std::filesystem::path temp_file(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove(p);
  return p;
}

TEST(Bench, DefaultSpecs) {
  const SweepSpec o = default_spec(SweepKind::kOutliers);
  ASSERT_EQ(o.p_grid.size(), 17u);
  EXPECT_EQ(o.p_grid.front(), 0.10);
  EXPECT_EQ(o.p_grid[1], 0.15);
  EXPECT_EQ(o.p_grid.back(), 0.90);
  EXPECT_EQ(o.removal_grid, std::vector<double>{0.4});
  EXPECT_EQ(o.d, 100);
  EXPECT_EQ(o.r, 5);
  EXPECT_TRUE(std::isinf(o.lambda));
  const SweepSpec rm = default_spec(SweepKind::kRemoval);
  EXPECT_EQ(rm.p_grid, (std::vector<double>{0.7, 0.75, 0.8, 0.85, 0.9}));
  EXPECT_EQ(rm.removal_grid, (std::vector<double>{0.3, 0.4, 0.5}));
  const SweepSpec nz = default_spec(SweepKind::kNoise);
  EXPECT_EQ(nz.sigma_grid, (std::vector<double>{1e-9, 1e-3, 1e-1}));
  EXPECT_EQ(nz.lambda, 1000.0);
  EXPECT_EQ(nz.removal_grid, std::vector<double>{0.3});
  for (SweepKind k : {SweepKind::kOutliers, SweepKind::kRemoval, SweepKind::kNoise,
                      SweepKind::kTiming}) {
    EXPECT_EQ(parse_sweep_kind(to_string(k)), k);
    EXPECT_NO_THROW(validate(default_spec(k)));
  }
  EXPECT_FALSE(parse_sweep_kind("speed"));
}

TEST(Bench, GridPointsNesting) {
  SweepSpec s = small_spec();
  s.sigma_grid = {0.0, 0.1};
  s.removal_grid = {0.3, 0.4};
  const auto pts = grid_points(s);
  ASSERT_EQ(pts.size(), 8u);
  EXPECT_EQ(pts[0].p, 0.2);
  EXPECT_EQ(pts[1].removal, 0.4);
  EXPECT_EQ(pts[2].sigma, 0.1);
  EXPECT_EQ(pts[4].p, 0.3);
}

TEST(Bench, ValidateRejects) {
  auto bad = [](auto mutate) {
    SweepSpec s = small_spec();
    mutate(s);
    return s;
  };
  EXPECT_THROW(validate(bad([](SweepSpec& s) { s.trials = 0; })), ConfigError);
  EXPECT_THROW(validate(bad([](SweepSpec& s) { s.p_grid = {1.2}; })), ConfigError);
  EXPECT_THROW(validate(bad([](SweepSpec& s) { s.removal_grid = {1.0}; })), ConfigError);
  EXPECT_THROW(validate(bad([](SweepSpec& s) { s.sigma_grid = {-1.0}; })), ConfigError);
  EXPECT_THROW(validate(bad([](SweepSpec& s) { s.methods.clear(); })), ConfigError);
  EXPECT_THROW(validate(bad([](SweepSpec& s) { s.d = 3; })), ConfigError);
  EXPECT_THROW(validate(bad([](SweepSpec& s) { s.time_limit_s = 0.0; })), ConfigError);
}

TEST(Bench, RowRoundTrip) {
  ResultRow row;
  row.experiment_id = "exp";
  row.method = "glimps";
  row.d = 100;
  row.r = 5;
  row.p = 0.35;
  row.sigma = 1e-3;
  row.lambda = kNoiseless;
  row.removal_fraction = 0.4;
  row.trial = 7;
  row.seed = 18446744073709551615ULL;
  row.coef_error = 1.0 / 3.0;
  row.misclass_ratio = std::numeric_limits<double>::quiet_NaN();
  row.misclass_ratio_stage2 = 0.25;
  row.wall_time_s = 1.5;
  row.solver_status = "optimal";
  row.nodes_explored = 123456;
  const std::string line = format_row(row);
  EXPECT_NE(line.find(",none,"), std::string::npos);
  const ResultRow back = parse_row(line);
  EXPECT_EQ(format_row(back), line);
  EXPECT_EQ(back.seed, row.seed);
  EXPECT_EQ(back.coef_error, row.coef_error);
  EXPECT_TRUE(std::isinf(back.lambda));
  EXPECT_TRUE(std::isnan(back.misclass_ratio));
  EXPECT_EQ(result_header(),
            "experiment_id,method,d,r,p,sigma,lambda,removal_fraction,trial,seed,coef_error,"
            "misclass_ratio,misclass_ratio_stage2,wall_time_s,solver_status,nodes_explored");
  EXPECT_THROW(parse_row("a,b,c"), IoError);
  EXPECT_THROW(parse_row("e,m,x,5,0.1,0,none,0.4,1,2,0,0,0,0,optimal,3"), IoError);
}

TEST(Bench, RunTrialIsDeterministic) {
  const SweepSpec s = small_spec();
  const GridPoint gp{0.2, 0.0, 0.4};
  const auto a = run_trial(s, gp, 1, s.methods);
  const auto b = run_trial(s, gp, 1, s.methods);
  ASSERT_EQ(a.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(a[k].seed, b[k].seed);
    EXPECT_EQ(a[k].coef_error, b[k].coef_error);
    EXPECT_EQ(a[k].misclass_ratio, b[k].misclass_ratio);
  }
  EXPECT_EQ(a[0].method, "greedy");
  EXPECT_EQ(a[0].solver_status, "none");
  EXPECT_EQ(a[1].method, "glimps");
  EXPECT_EQ(a[1].solver_status, "optimal");
  EXPECT_EQ(a[1].experiment_id, "outliers");
}

TEST(Bench, FailingMethodBecomesErrorRow) {
  SweepSpec s = small_spec();
  s.d = 30;
  const auto rows = run_trial(s, GridPoint{0.2, 0.0, 0.4}, 0, {Method::kOracle});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].solver_status, "error");
  EXPECT_TRUE(std::isnan(rows[0].coef_error));
  EXPECT_TRUE(std::isnan(rows[0].misclass_ratio));
}

TEST(Bench, SweepWritesAndResumes) {
  const auto path = temp_file("glimps_sweep_resume.csv");
  const SweepSpec s = small_spec();
  int callbacks = 0;
  const SweepReport first = run_sweep(s, path, [&](const ResultRow&) { ++callbacks; });
  EXPECT_EQ(first.expected, 8);
  EXPECT_EQ(first.produced, 8);
  EXPECT_EQ(callbacks, 8);
  EXPECT_TRUE(first.complete());

  std::ifstream in(path);
  const auto on_disk = read_rows_csv(in);
  in.close();
  ASSERT_EQ(on_disk.size(), 8u);

  const SweepReport again = run_sweep(s, path);
  EXPECT_EQ(again.resumed, 8);
  EXPECT_EQ(again.produced, 0);
  EXPECT_TRUE(again.complete());

  // Drop the last three rows and resume: only those are recomputed.
  {
    std::ofstream out(path);
    write_rows_csv(std::vector<ResultRow>(on_disk.begin(), on_disk.end() - 3), out);
  }
  const SweepReport partial = run_sweep(s, path);
  EXPECT_EQ(partial.resumed, 5);
  EXPECT_EQ(partial.produced, 3);
  ASSERT_EQ(partial.rows.size(), 8u);
  for (std::size_t k = 0; k < 8; ++k) {
    EXPECT_EQ(partial.rows[k].method, on_disk[k].method);
    EXPECT_EQ(partial.rows[k].trial, on_disk[k].trial);
    EXPECT_EQ(partial.rows[k].coef_error, on_disk[k].coef_error);
  }
  std::filesystem::remove(path);
}

TEST(Bench, WorkerCountDoesNotChangeResults) {
  SweepSpec s = small_spec();
  const SweepReport one = run_sweep(s);
  s.workers = 3;
  const SweepReport three = run_sweep(s);
  ASSERT_EQ(one.rows.size(), three.rows.size());
  for (std::size_t k = 0; k < one.rows.size(); ++k) {
    EXPECT_EQ(one.rows[k].seed, three.rows[k].seed);
    EXPECT_EQ(one.rows[k].coef_error, three.rows[k].coef_error);
  }
}

TEST(Bench, WorkerCountEnvironment) {
  SweepSpec s = small_spec();
  s.workers = 2;
  ::unsetenv("GLIMPS_WORKERS");
  EXPECT_EQ(worker_count(s), 2);
  ::setenv("GLIMPS_WORKERS", "5", 1);
  EXPECT_EQ(worker_count(s), 5);
  ::unsetenv("GLIMPS_WORKERS");
  s.workers = 0;
  EXPECT_GE(worker_count(s), 1);
}

TEST(Bench, Summarize) {
  auto row = [](std::string method, double coef, double mis, double wall) {
    ResultRow r;
    r.method = std::move(method);
    r.d = 10;
    r.r = 2;
    r.p = 0.5;
    r.coef_error = coef;
    r.misclass_ratio = mis;
    r.wall_time_s = wall;
    return r;
  };
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const auto s = summarize({row("glimps", 0.0, 0.0, 1.0), row("glimps", 0.5, 0.5, 3.0),
                            row("glimps", nan, nan, 2.0), row("greedy", 1e-7, 0.1, 0.5)});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].method, "glimps");
  EXPECT_EQ(s[0].n, 3);
  EXPECT_EQ(s[0].errors, 1);
  EXPECT_DOUBLE_EQ(s[0].coef_error_mean, 0.25);
  EXPECT_DOUBLE_EQ(s[0].coef_error_std, std::sqrt(0.125));
  EXPECT_DOUBLE_EQ(s[0].wall_time_mean, 2.0);
  EXPECT_DOUBLE_EQ(s[0].wall_time_std, 1.0);
  EXPECT_DOUBLE_EQ(s[0].success_rate, 1.0 / 3.0);
  EXPECT_EQ(s[1].n, 1);
  EXPECT_EQ(s[1].coef_error_std, 0.0);
  EXPECT_EQ(s[1].success_rate, 1.0);
  std::ostringstream out;
  write_summary_csv(s, out);
  const std::string text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
}

}  // namespace
}  // namespace glimps
