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

#include "glimps/lp.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "glimps/errors.h"

namespace glimps::lp {
namespace {

constexpr double kPivotTol = 1e-9;
// Consecutive degenerate pivots tolerated before switching to Bland's rule.
constexpr int kDegenerateLimit = 50;

void validate(const LinearProgram& lp) {
  const auto m = lp.num_rows();
  const auto n = lp.num_cols();
  if (lp.objective.size() != n || lp.col_lower.size() != n || lp.col_upper.size() != n ||
      lp.row_lower.size() != m || lp.row_upper.size() != m) {
    throw DomainError("linear program: inconsistent dimensions");
  }
  if (!lp.constraints.allFinite() || !lp.objective.allFinite()) {
    throw DomainError("linear program: non-finite coefficients");
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (std::isnan(lp.col_lower[j]) || std::isnan(lp.col_upper[j]) ||
        lp.col_lower[j] > lp.col_upper[j]) {
      throw DomainError("linear program: invalid column bounds");
    }
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (std::isnan(lp.row_lower[i]) || std::isnan(lp.row_upper[i]) ||
        lp.row_lower[i] > lp.row_upper[i]) {
      throw DomainError("linear program: invalid row bounds");
    }
  }
}

// Tableau over [structural | row activity | artificial] variables with the
// equality system  A y - s + diag(sign) a = 0. Nonbasic variables may rest
// anywhere inside their bounds; they move in whichever direction pricing asks.
class Tableau {
 public:
  Tableau(const LinearProgram& lp, const LpOptions& options)
      : m_(lp.num_rows()),
        n_(lp.num_cols()),
        total_(n_ + 2 * m_),
        options_(options),
        table_(m_, total_),
        lower_(total_),
        upper_(total_),
        value_(total_),
        cost_(Eigen::VectorXd::Zero(total_)),
        basis_(static_cast<std::size_t>(m_)),
        is_basic_(static_cast<std::size_t>(total_), false) {
    for (Eigen::Index j = 0; j < n_; ++j) {
      lower_[j] = lp.col_lower[j];
      upper_[j] = lp.col_upper[j];
      value_[j] = initial_value(lower_[j], upper_[j]);
    }
    const Eigen::VectorXd activity = lp.constraints * value_.head(n_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      const Eigen::Index s = n_ + i;
      lower_[s] = lp.row_lower[i];
      upper_[s] = lp.row_upper[i];
      value_[s] = std::clamp(activity[i], lower_[s], upper_[s]);
    }
    table_.setZero();
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double residual = value_[n_ + i] - activity[i];  // = sign * a
      const double sign = residual >= 0.0 ? 1.0 : -1.0;
      // Row i of B^{-1} [A -I diag(sign)] with B = diag(sign).
      table_.row(i).head(n_) = sign * lp.constraints.row(i);
      table_(i, n_ + i) = -sign;
      const Eigen::Index a = n_ + m_ + i;
      table_(i, a) = 1.0;
      lower_[a] = 0.0;
      upper_[a] = kInf;
      value_[a] = std::abs(residual);
      basis_[static_cast<std::size_t>(i)] = a;
      is_basic_[static_cast<std::size_t>(a)] = true;
    }
  }

  LpStatus run_phase_one() {
    cost_.setZero();
    cost_.tail(m_).setOnes();
    return iterate();
  }

  double infeasibility() const { return value_.tail(m_).sum(); }

  LpStatus run_phase_two(const Eigen::VectorXd& objective) {
    for (Eigen::Index a = n_ + m_; a < total_; ++a) upper_[a] = 0.0;
    cost_.setZero();
    cost_.head(n_) = objective;
    return iterate();
  }

  Eigen::VectorXd structural() const { return value_.head(n_); }
  int iterations() const { return iterations_; }

 private:
  static double initial_value(double lo, double hi) {
    if (lo <= 0.0 && hi >= 0.0) return 0.0;
    return std::isfinite(lo) ? lo : hi;
  }

  Eigen::VectorXd reduced_costs() const {
    Eigen::VectorXd basic_cost(m_);
    for (Eigen::Index i = 0; i < m_; ++i) basic_cost[i] = cost_[basis_[static_cast<std::size_t>(i)]];
    Eigen::VectorXd d = cost_ - table_.transpose() * basic_cost;
    for (Eigen::Index i = 0; i < m_; ++i) d[basis_[static_cast<std::size_t>(i)]] = 0.0;
    return d;
  }

  // Returns +1 / -1 for an improving direction of nonbasic j, 0 otherwise.
  int direction(Eigen::Index j, double dj) const {
    const double tol = options_.optimality_tol;
    if (dj < -tol && value_[j] < upper_[j]) return 1;
    if (dj > tol && value_[j] > lower_[j]) return -1;
    return 0;
  }

  LpStatus iterate() {
    const int limit = options_.max_iterations > 0
                          ? options_.max_iterations
                          : static_cast<int>(50 * (m_ + n_) + 1000);
    Eigen::VectorXd d = reduced_costs();
    int degenerate_run = 0;
    for (;;) {
      if (iterations_ >= limit) return LpStatus::kIterationLimit;
      const bool bland = degenerate_run >= kDegenerateLimit;

      Eigen::Index entering = -1;
      int dir = 0;
      double best = 0.0;
      for (Eigen::Index j = 0; j < total_; ++j) {
        if (is_basic_[static_cast<std::size_t>(j)]) continue;
        const int dj_dir = direction(j, d[j]);
        if (dj_dir == 0) continue;
        if (bland) {
          entering = j;
          dir = dj_dir;
          break;
        }
        if (std::abs(d[j]) > best) {
          best = std::abs(d[j]);
          entering = j;
          dir = dj_dir;
        }
      }
      if (entering < 0) return LpStatus::kOptimal;

      // Ratio test. Moving the entering variable by dir * t changes basic
      // variable i by -dir * t * table(i, entering).
      double step = dir > 0 ? upper_[entering] - value_[entering]
                            : value_[entering] - lower_[entering];
      Eigen::Index leaving_row = -1;
      double leaving_alpha = 0.0;
      for (Eigen::Index i = 0; i < m_; ++i) {
        const double alpha = dir * table_(i, entering);
        if (std::abs(alpha) <= kPivotTol) continue;
        const Eigen::Index b = basis_[static_cast<std::size_t>(i)];
        double limit_i = kInf;
        if (alpha > 0.0 && std::isfinite(lower_[b])) {
          limit_i = std::max(0.0, (value_[b] - lower_[b]) / alpha);
        } else if (alpha < 0.0 && std::isfinite(upper_[b])) {
          limit_i = std::max(0.0, (upper_[b] - value_[b]) / -alpha);
        }
        if (!std::isfinite(limit_i)) continue;
        bool take = limit_i < step - 1e-12;
        if (!take && leaving_row >= 0 && limit_i <= step + 1e-12) {
          take = bland ? b < basis_[static_cast<std::size_t>(leaving_row)]
                       : std::abs(alpha) > std::abs(leaving_alpha);
        }
        if (take) {
          step = std::min(step, limit_i);
          leaving_row = i;
          leaving_alpha = alpha;
        }
      }
      if (!std::isfinite(step)) return LpStatus::kUnbounded;
      ++iterations_;
      degenerate_run = step <= 1e-12 ? degenerate_run + 1 : 0;

      value_[entering] += dir * step;
      for (Eigen::Index i = 0; i < m_; ++i) {
        value_[basis_[static_cast<std::size_t>(i)]] -= dir * step * table_(i, entering);
      }

      if (leaving_row < 0) {
        // Bound flip of the entering variable; the basis is unchanged.
        value_[entering] = dir > 0 ? upper_[entering] : lower_[entering];
        continue;
      }

      const Eigen::Index leaving = basis_[static_cast<std::size_t>(leaving_row)];
      value_[leaving] = leaving_alpha > 0.0 ? lower_[leaving] : upper_[leaving];
      pivot(leaving_row, entering, d);
      is_basic_[static_cast<std::size_t>(leaving)] = false;
      is_basic_[static_cast<std::size_t>(entering)] = true;
      basis_[static_cast<std::size_t>(leaving_row)] = entering;
    }
  }

  void pivot(Eigen::Index row, Eigen::Index col, Eigen::VectorXd& d) {
    const double p = table_(row, col);
    table_.row(row) /= p;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (i == row) continue;
      const double f = table_(i, col);
      if (f != 0.0) table_.row(i) -= f * table_.row(row);
    }
    const double f = d[col];
    if (f != 0.0) d -= f * table_.row(row).transpose();
    d[col] = 0.0;
  }

  Eigen::Index m_;
  Eigen::Index n_;
  Eigen::Index total_;
  LpOptions options_;
  Eigen::MatrixXd table_;
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
  Eigen::VectorXd value_;
  Eigen::VectorXd cost_;
  std::vector<Eigen::Index> basis_;
  std::vector<bool> is_basic_;
  int iterations_ = 0;
};

}  // namespace

LinearProgram::LinearProgram(Eigen::Index num_rows, Eigen::Index num_cols)
    : constraints(Eigen::MatrixXd::Zero(num_rows, num_cols)),
      objective(Eigen::VectorXd::Zero(num_cols)),
      col_lower(Eigen::VectorXd::Constant(num_cols, -kInf)),
      col_upper(Eigen::VectorXd::Constant(num_cols, kInf)),
      row_lower(Eigen::VectorXd::Constant(num_rows, -kInf)),
      row_upper(Eigen::VectorXd::Constant(num_rows, kInf)) {}

std::string_view to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kIterationLimit: return "iteration_limit";
  }
  return "unknown";
}

LpSolution solve(const LinearProgram& lp, const LpOptions& options) {
  validate(lp);
  Tableau tableau(lp, options);
  LpSolution solution;

  const double scale =
      1.0 + std::max(lp.constraints.size() > 0 ? lp.constraints.cwiseAbs().maxCoeff() : 0.0, 1.0);
  LpStatus status = tableau.run_phase_one();
  if (status == LpStatus::kIterationLimit) {
    solution.status = status;
    solution.iterations = tableau.iterations();
    return solution;
  }
  if (tableau.infeasibility() > options.feasibility_tol * scale * (1.0 + lp.num_rows())) {
    solution.status = LpStatus::kInfeasible;
    solution.iterations = tableau.iterations();
    return solution;
  }
  status = tableau.run_phase_two(lp.objective);
  solution.status = status;
  solution.iterations = tableau.iterations();
  solution.x = tableau.structural();
  solution.row_activity = lp.constraints * solution.x;
  solution.objective = lp.objective.dot(solution.x);
  return solution;
}

}  // namespace glimps::lp
