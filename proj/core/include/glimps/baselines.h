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

#ifndef GLIMPS_BASELINES_H_
#define GLIMPS_BASELINES_H_

#include <optional>
#include <string_view>

#include "glimps/linalg.h"
#include "glimps/pipeline.h"

namespace glimps {

enum class Method { kGreedyOnly, kMilpOnly, kL1, kGreedyPlusL1, kGlimps, kOracle };

// CLI names: greedy, milp, l1, greedy-l1, glimps, oracle.
std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view name);

// argmin_theta sum_i |x_i - u_i theta| as a linear program over theta and
// split residuals s+ - s- = x - u theta.
Vector l1_fit(const Matrix& u, const Vector& x);

// Greedy removal of removal_count coordinates, then the fit on survivors
// (least squares or l1), then classification of all coordinates. The
// stage-2 labels are the survivor set.
DetectionResult greedy_only(const Matrix& u, const Vector& x, int removal_count, double tau);
DetectionResult greedy_plus_l1(const Matrix& u, const Vector& x, int removal_count,
                               double tau);
DetectionResult l1_only(const Matrix& u, const Vector& x, double tau);

// The exact stage-2 model on all d coordinates, no greedy stage.
DetectionResult milp_only(const Matrix& u, const Vector& x, const GlimpsConfig& cfg,
                          const SolverOptions& options = {});

struct Consensus {
  IndexSet inliers;
  Vector theta;
};

inline constexpr int kOracleMaxDim = 25;
inline constexpr double kOracleMaxCond = 1e10;

// Largest set {i : |x_i - u_i theta| <= tol} over theta fitted exactly to an
// r-subset; ties go to the lexicographically smallest set. Throws
// BudgetError when d > kOracleMaxDim unless allow_large is set.
Consensus brute_force_consensus(const Matrix& u, const Vector& x, double tol,
                                bool allow_large = false);

}  // namespace glimps

#endif  // GLIMPS_BASELINES_H_
