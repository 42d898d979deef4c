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

#include "glimps/baselines.h"

#include <algorithm>
#include <chrono>

#include "glimps/errors.h"
#include "glimps/greedy.h"
#include "glimps/lp.h"

namespace glimps {
namespace {

DetectionResult finish_fit(const Matrix& u, const Vector& x, GreedyResult stage1,
                           Vector theta, double tau) {
  DetectionResult out;
  out.tau = tau;
  out.theta_hat = std::move(theta);
  Classification c = classify_all(u, x, out.theta_hat, tau);
  out.labels = std::move(c.labels);
  out.residuals = std::move(c.residuals);
  out.inliers = inlier_set(out.labels);
  out.stage2_labels.assign(static_cast<std::size_t>(x.size()), Label::kOutlier);
  for (int i : stage1.survivors) out.stage2_labels[static_cast<std::size_t>(i)] = Label::kInlier;
  out.survivors = std::move(stage1.survivors);
  out.stage1_trace = std::move(stage1.trace);
  out.stage2.status = SolveStatus::kOptimal;
  out.recovered = true;
  return out;
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kGreedyOnly: return "greedy";
    case Method::kMilpOnly: return "milp";
    case Method::kL1: return "l1";
    case Method::kGreedyPlusL1: return "greedy-l1";
    case Method::kGlimps: return "glimps";
    case Method::kOracle: return "oracle";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : {Method::kGreedyOnly, Method::kMilpOnly, Method::kL1, Method::kGreedyPlusL1,
                   Method::kGlimps, Method::kOracle}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

Vector l1_fit(const Matrix& u, const Vector& x) {
  if (u.rows() != x.size()) throw DomainError("l1_fit: shape mismatch");
  const auto d = u.rows();
  const auto r = u.cols();
  if (d < r + 1) throw DomainError("l1_fit: need d >= r + 1");
  // Rank check; the least-squares value itself is not used.
  (void)least_squares(u, x);

  lp::LinearProgram prog(d, r + 2 * d);
  prog.constraints.leftCols(r) = u.values();
  prog.constraints.middleCols(r, d) = Eigen::MatrixXd::Identity(d, d);
  prog.constraints.rightCols(d) = -Eigen::MatrixXd::Identity(d, d);
  prog.row_lower = x.values();
  prog.row_upper = x.values();
  prog.objective.tail(2 * d).setOnes();
  prog.col_lower.tail(2 * d).setZero();
  const auto sol = lp::solve(prog);
  if (sol.status != lp::LpStatus::kOptimal) {
    throw Error("l1_fit: LP ended with status " + std::string(lp::to_string(sol.status)));
  }
  return Vector(sol.x.head(r));
}

DetectionResult greedy_only(const Matrix& u, const Vector& x, int removal_count, double tau) {
  GreedyResult g = greedy_erase_count(u, x, removal_count);
  Vector theta = least_squares(restrict_rows(u, g.survivors), restrict(x, g.survivors));
  return finish_fit(u, x, std::move(g), std::move(theta), tau);
}

DetectionResult greedy_plus_l1(const Matrix& u, const Vector& x, int removal_count,
                               double tau) {
  GreedyResult g = greedy_erase_count(u, x, removal_count);
  Vector theta = l1_fit(restrict_rows(u, g.survivors), restrict(x, g.survivors));
  return finish_fit(u, x, std::move(g), std::move(theta), tau);
}

DetectionResult l1_only(const Matrix& u, const Vector& x, double tau) {
  return greedy_plus_l1(u, x, 0, tau);
}

DetectionResult milp_only(const Matrix& u, const Vector& x, const GlimpsConfig& cfg,
                          const SolverOptions& options) {
  GreedyResult all{IndexSet::range(static_cast<int>(x.size())), {}};
  return detect_on_survivors(u, x, std::move(all), cfg, options);
}

Consensus brute_force_consensus(const Matrix& u, const Vector& x, double tol,
                                bool allow_large) {
  if (u.rows() != x.size()) throw DomainError("brute_force_consensus: shape mismatch");
  if (!(tol >= 0.0)) throw ConfigError("brute_force_consensus: tol must be >= 0");
  const int d = static_cast<int>(u.rows());
  const int r = static_cast<int>(u.cols());
  if (d > kOracleMaxDim && !allow_large) {
    throw BudgetError("brute_force_consensus: d exceeds the enumeration budget");
  }
  if (r > d) throw DomainError("brute_force_consensus: r > d");

  std::vector<int> best;
  std::vector<int> subset(static_cast<std::size_t>(r));
  for (int k = 0; k < r; ++k) subset[static_cast<std::size_t>(k)] = k;
  Eigen::MatrixXd a(r, r);
  Eigen::VectorXd b(r);
  std::vector<int> current;
  while (true) {
    for (int k = 0; k < r; ++k) {
      a.row(k) = u.values().row(subset[static_cast<std::size_t>(k)]);
      b[k] = x[subset[static_cast<std::size_t>(k)]];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    if (s[r - 1] > 0.0 && s[0] / s[r - 1] <= kOracleMaxCond) {
      const Eigen::VectorXd theta = svd.solve(b);
      const Eigen::VectorXd res = abs_residuals(u.values(), x.values(), theta);
      current.clear();
      for (int i = 0; i < d; ++i) {
        if (res[i] <= tol) current.push_back(i);
      }
      if (current.size() > best.size() || (current.size() == best.size() && current < best)) {
        best = current;
      }
    }
    // Next r-subset in lexicographic order.
    int k = r - 1;
    while (k >= 0 && subset[static_cast<std::size_t>(k)] == d - r + k) --k;
    if (k < 0) break;
    ++subset[static_cast<std::size_t>(k)];
    for (int l = k + 1; l < r; ++l) {
      subset[static_cast<std::size_t>(l)] = subset[static_cast<std::size_t>(l - 1)] + 1;
    }
  }

  Consensus out;
  out.inliers = IndexSet::from_zero_based(best);
  if (static_cast<int>(best.size()) >= r) {
    out.theta = least_squares(restrict_rows(u, out.inliers), restrict(x, out.inliers));
  } else {
    out.theta = Vector::zeros(r);
  }
  return out;
}

}  // namespace glimps
