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

#ifndef GLIMPS_BENCH_H_
#define GLIMPS_BENCH_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "glimps/baselines.h"
#include "glimps/milp.h"

namespace glimps {

enum class SweepKind { kOutliers, kRemoval, kNoise, kTiming };

std::string_view to_string(SweepKind k);
std::optional<SweepKind> parse_sweep_kind(std::string_view name);

struct SweepSpec {
  SweepKind kind = SweepKind::kOutliers;
  std::string experiment_id;  // empty: the sweep kind name
  int d = 100;
  int r = 5;
  std::vector<double> p_grid;
  std::vector<double> removal_grid;
  std::vector<double> sigma_grid;
  double lambda = kNoiseless;
  int trials = 50;
  double time_limit_s = 60.0;
  std::uint64_t base_seed = 1;
  std::vector<Method> methods;
  // Removal for the greedy and greedy-l1 methods as a fraction of d.
  // Unset: the instance's true outlier count, capped at d - r - 1.
  std::optional<double> greedy_removal_fraction;
  std::optional<double> tau;
  // 0: GLIMPS_WORKERS if set, else the hardware concurrency.
  int workers = 0;
};

// Grids and methods for each kind:
//   outliers/timing  p 0.10..0.90 step 0.05, removal {0.4}, sigma {0}
//   removal          p 0.70..0.90 step 0.05, removal {0.3, 0.4, 0.5}
//   noise            removal {0.3}, sigma {1e-9, 1e-3, 1e-1}, lambda 1000
SweepSpec default_spec(SweepKind kind);

void validate(const SweepSpec& spec);

struct GridPoint {
  double p = 0.0;
  double sigma = 0.0;
  double removal = 0.0;
};

// Cartesian product p x sigma x removal, in that nesting order.
std::vector<GridPoint> grid_points(const SweepSpec& spec);

int worker_count(const SweepSpec& spec);

struct ResultRow {
  std::string experiment_id;
  std::string method;
  int d = 0;
  int r = 0;
  double p = 0.0;
  double sigma = 0.0;
  double lambda = kNoiseless;
  double removal_fraction = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  double coef_error = 0.0;
  double misclass_ratio = 0.0;
  double misclass_ratio_stage2 = 0.0;
  double wall_time_s = 0.0;
  std::string solver_status;
  long nodes_explored = 0;
};

inline constexpr std::array<std::string_view, 16> kResultColumns = {
    "experiment_id", "method", "d", "r", "p", "sigma", "lambda", "removal_fraction",
    "trial", "seed", "coef_error", "misclass_ratio", "misclass_ratio_stage2",
    "wall_time_s", "solver_status", "nodes_explored"};

std::string result_header();
std::string format_row(const ResultRow& row);
ResultRow parse_row(const std::string& line);
std::vector<ResultRow> read_rows_csv(std::istream& in);
void write_rows_csv(const std::vector<ResultRow>& rows, std::ostream& out);

// Canonical order: experiment, method, p, sigma, removal, trial.
void sort_rows(std::vector<ResultRow>& rows);

// One row per requested method for one (grid point, trial). Method
// failures become rows with solver_status "error" and NaN metrics.
std::vector<ResultRow> run_trial(const SweepSpec& spec, const GridPoint& gp, int trial,
                                 const std::vector<Method>& methods);

struct SweepReport {
  std::vector<ResultRow> rows;  // canonical order, resumed rows included
  long expected = 0;
  long resumed = 0;
  long produced = 0;

  bool complete() const { return resumed + produced == expected; }
};

using RowCallback = std::function<void(const ResultRow&)>;

// Runs every (grid point, trial, method) key. With a path, rows already in
// that file are kept and skipped, new rows are appended as they finish, and
// the file is finally rewritten in canonical order.
SweepReport run_sweep(const SweepSpec& spec,
                      const std::optional<std::filesystem::path>& out = std::nullopt,
                      const RowCallback& on_row = {});

struct SummaryRow {
  std::string method;
  int d = 0;
  int r = 0;
  double p = 0.0;
  double sigma = 0.0;
  double lambda = kNoiseless;
  double removal_fraction = 0.0;
  int n = 0;
  int errors = 0;
  double coef_error_mean = 0.0;
  double coef_error_std = 0.0;
  double misclass_mean = 0.0;
  double misclass_std = 0.0;
  double wall_time_mean = 0.0;
  double wall_time_std = 0.0;
  double success_rate = 0.0;
};

// Mean and sample standard deviation per (method, grid point). NaN
// metrics are left out of the means and counted in errors.
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);
void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out);
void write_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path);

}  // namespace glimps

#endif  // GLIMPS_BENCH_H_
