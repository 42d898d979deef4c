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
#ifndef GLIMPS_LP_H_
#define GLIMPS_LP_H_

#include <limits>
#include <string_view>

#include <Eigen/Dense>

namespace glimps::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// minimize    objective' y
// subject to  row_lower <= constraints * y <= row_upper
//             col_lower <= y <= col_upper
// Infinite bounds are allowed; row_lower == row_upper gives an equality.
struct LinearProgram {
  Eigen::MatrixXd constraints;
  Eigen::VectorXd objective;
  Eigen::VectorXd col_lower;
  Eigen::VectorXd col_upper;
  Eigen::VectorXd row_lower;
  Eigen::VectorXd row_upper;

  LinearProgram() = default;
  // All columns free, all rows unbounded, zero objective.
  LinearProgram(Eigen::Index num_rows, Eigen::Index num_cols);

  Eigen::Index num_rows() const noexcept { return constraints.rows(); }
  Eigen::Index num_cols() const noexcept { return constraints.cols(); }
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

std::string_view to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd row_activity;
  int iterations = 0;
};

struct LpOptions {
  int max_iterations = 0;  // 0: 50 * (rows + cols) + 1000
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
};

// Two-phase primal simplex on a dense tableau with bounded variables.
// Throws DomainError on inconsistent dimensions, NaN data or crossed bounds.
LpSolution solve(const LinearProgram& lp, const LpOptions& options = {});

}  // namespace glimps::lp

#endif  // GLIMPS_LP_H_
