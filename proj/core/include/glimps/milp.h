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
#ifndef GLIMPS_MILP_H_
#define GLIMPS_MILP_H_

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "glimps/linalg.h"
#include "glimps/lp.h"

namespace glimps {

// lambda value selecting the noiseless formulation (w forced to zero).
inline constexpr double kNoiseless = std::numeric_limits<double>::infinity();

enum class SolveStatus { kOptimal, kFeasibleTimeLimit, kInfeasible };

std::string_view to_string(SolveStatus status);

// Indicator vector: z[i] == 1 marks coordinate i as an outlier.
using Indicator = std::vector<std::uint8_t>;

struct WarmStart {
  Indicator z;
  Vector theta;
};

//   min  sum(z) + lambda ||w||^2
//   s.t. |obs - basis theta - w| <= big_m z,  z binary
// With lambda == kNoiseless, w is identically zero and the objective is sum(z).
struct MilpProblem {
  Matrix basis;
  Vector obs;
  double big_m = 1.0;
  double lambda = kNoiseless;
  double time_limit_s = 60.0;
  // Relative: a node is pruned once its bound is within
  // gap_tol * max(1, |incumbent|) of the incumbent.
  double gap_tol = 0.0;
  std::optional<WarmStart> warm_start;
  // Absolute slack on the constraints; an inlier residual counts as zero
  // below this.
  double feas_tol = 1e-7;

  bool noiseless() const { return std::isinf(lambda); }
};

struct MilpSolution {
  Indicator z;
  Vector theta;
  Vector w;
  double objective = 0.0;
  SolveStatus status = SolveStatus::kInfeasible;
  long nodes_explored = 0;
  double wall_time_s = 0.0;
  // Global lower bound at termination.
  double best_bound = 0.0;
  // An assignment with a lower objective than z that breaks the big-M
  // bounds, if one was seen: evidence that big_m is too small.
  std::optional<WarmStart> big_m_witness;

  // Coordinates with z == 0.
  IndexSet inliers() const;
};

struct NodeEvent {
  long node = 0;
  int depth = 0;
  // Per coordinate: -1 free, 0 forced inlier, 1 forced outlier.
  std::span<const std::int8_t> fixing;
  double bound = 0.0;
  // LP relaxation value, NaN where it was not evaluated.
  double lp_bound = std::numeric_limits<double>::quiet_NaN();
};

struct SolverOptions {
  // Receives "node=<n> bound=<b> incumbent=<i> gap=<g> t=<s>" lines.
  std::ostream* log = nullptr;
  long log_every = 1'000'000;
  // Nodes at depth <= lp_bound_depth also get the LP relaxation bound
  // (root = 0). Negative disables the relaxation bound, including at the root.
  int lp_bound_depth = 0;
  // Test knob: stop after this many nodes (0 = unlimited). Hitting it is
  // reported as kFeasibleTimeLimit.
  long max_nodes = 0;
  // Absolute deadline; overrides time_limit_s when set.
  std::optional<std::chrono::steady_clock::time_point> deadline;
  // Noisy mode: run the consensus heuristic before the exact search.
  bool primal_heuristic = true;
  // Return as soon as a big-M witness is found (status kFeasibleTimeLimit).
  bool stop_on_big_m_witness = false;
  std::function<void(const NodeEvent&)> on_node;
  std::function<void(double objective, long node)> on_incumbent;
};

// safety * max_i |x_i - u_i theta_init|, floored at 1e-6.
double choose_big_m(const Matrix& u, const Vector& x, const Vector& theta_init,
                    double safety);

// LP relaxation of the noiseless problem with z in [0, 1]. Columns are
// theta (free) followed by z; rows alternate
//   u_i theta - M z_i <= x_i   and   -u_i theta - M z_i <= -x_i.
// `fixing`, when given, pins z_i to 0 or 1 where fixing[i] >= 0.
lp::LinearProgram big_m_relaxation(const MilpProblem& p,
                                   std::span<const std::int8_t> fixing = {});

// Objective of (z, theta) with the optimal slack w for that pair, or +inf
// when the pair violates a constraint.
double assignment_objective(const MilpProblem& p, const Indicator& z,
                            const Vector& theta);

// Best theta for a fixed indicator: least squares on the z == 0 rows.
// Returns nullopt when those rows are rank deficient.
std::optional<Vector> refit_theta(const MilpProblem& p, const Indicator& z);

MilpSolution solve_noiseless(const MilpProblem& p, const SolverOptions& options = {});
MilpSolution solve_noisy(const MilpProblem& p, const SolverOptions& options = {});
// Dispatches on p.noiseless().
MilpSolution solve(const MilpProblem& p, const SolverOptions& options = {});

struct EscalationResult {
  MilpSolution solution;
  double big_m = 0.0;
  int escalations = 0;
};

// Solves, then re-solves with 2M warm-started from the previous solution.
// If the doubled problem has a strictly better optimum (or the original was
// infeasible) M was too small: keep doubling, at most max_escalations times.
// Every solve shares one deadline derived from p.time_limit_s.
EscalationResult solve_with_escalation(MilpProblem p, const SolverOptions& options = {},
                                       int max_escalations = 3);

}  // namespace glimps

#endif  // GLIMPS_MILP_H_
