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

#include "glimps/greedy.h"

#include <cmath>
#include <ostream>
#include <string>

#include "glimps/csv_io.h"
#include "glimps/errors.h"

namespace glimps {
namespace {

void check_shapes(const Matrix& u, const Vector& x) {
  if (u.empty() || x.empty()) throw DomainError("greedy: empty basis or observation");
  if (u.rows() != x.size()) throw DomainError("greedy: basis rows != observation length");
}

// Ratio of the projection of x restricted to `rows` onto u restricted to the
// same rows. A zero restricted observation lies in every subspace and scores
// 1. Returns false when the restriction is rank deficient.
bool candidate_ratio(const Eigen::MatrixXd& u_rows, const Eigen::VectorXd& x_rows,
                     double& ratio) {
  const double denom = x_rows.norm();
  double num = 0.0;
  if (!detail::projection_norm(u_rows, x_rows, num)) return false;
  ratio = denom == 0.0 ? 1.0 : num / denom;
  return true;
}

}  // namespace

Removal best_removal(const Matrix& u, const Vector& x, const IndexSet& active,
                     long* projection_calls) {
  check_shapes(u, x);
  const auto r = static_cast<std::size_t>(u.cols());
  if (active.size() < r + 2) {
    throw ConfigError("best_removal needs at least r + 2 active coordinates");
  }
  if (active.max() >= u.rows()) throw DomainError("best_removal: index out of range");

  const auto n = static_cast<Eigen::Index>(active.size());
  Eigen::MatrixXd u_active(n, u.cols());
  Eigen::VectorXd x_active(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    u_active.row(k) = u.values().row(active[static_cast<std::size_t>(k)]);
    x_active[k] = x[active[static_cast<std::size_t>(k)]];
  }

  // Candidate k drops row k; rows are kept in active order.
  std::vector<double> ratios(static_cast<std::size_t>(n), -1.0);
  Eigen::MatrixXd u_cand(n - 1, u.cols());
  Eigen::VectorXd x_cand(n - 1);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (k > 0) {
      u_cand.topRows(k) = u_active.topRows(k);
      x_cand.head(k) = x_active.head(k);
    }
    if (k < n - 1) {
      u_cand.bottomRows(n - 1 - k) = u_active.bottomRows(n - 1 - k);
      x_cand.tail(n - 1 - k) = x_active.tail(n - 1 - k);
    }
    double ratio = 0.0;
    if (candidate_ratio(u_cand, x_cand, ratio)) ratios[static_cast<std::size_t>(k)] = ratio;
    if (projection_calls != nullptr) ++*projection_calls;
  }

  double best = -1.0;
  for (double v : ratios) best = std::max(best, v);
  if (best < 0.0) {
    throw DegenerateActiveSetError("every single removal leaves a rank-deficient basis");
  }
  // Active is increasing, so the first qualifying candidate has the smallest index.
  for (std::size_t k = 0; k < ratios.size(); ++k) {
    if (ratios[k] >= 0.0 && ratios[k] >= best - kRatioTieTol) {
      return {active[k], ratios[k]};
    }
  }
  return {active[0], ratios[0]};  // unreachable
}

int removal_count_for(double removal_fraction, int d) {
  if (!(removal_fraction >= 0.0 && removal_fraction < 1.0)) {
    throw ConfigError("removal_fraction must lie in [0, 1)");
  }
  // Guard against 0.4 * 100 = 39.999... style truncation.
  return static_cast<int>(std::floor(removal_fraction * d + 1e-9));
}

GreedyResult greedy_erase_count(const Matrix& u, const Vector& x, int removal_count,
                                int min_survivors) {
  check_shapes(u, x);
  const int d = static_cast<int>(u.rows());
  const int r = static_cast<int>(u.cols());
  const int floor_survivors = std::max(min_survivors, r + 1);
  if (removal_count < 0 || removal_count > d - floor_survivors) {
    throw ConfigError("greedy: removing " + std::to_string(removal_count) + " of " +
                      std::to_string(d) + " coordinates leaves fewer than " +
                      std::to_string(floor_survivors) + " survivors");
  }

  GreedyResult result;
  IndexSet active = IndexSet::range(d);
  result.trace.steps.reserve(static_cast<std::size_t>(removal_count));
  for (int step = 0; step < removal_count; ++step) {
    const Removal removal = best_removal(u, x, active, &result.trace.projection_calls);
    result.trace.steps.push_back(
        {removal.index, removal.ratio, static_cast<int>(active.size())});
    active = active.without(removal.index);
  }
  result.survivors = std::move(active);
  return result;
}

GreedyResult greedy_erase(const Matrix& u, const Vector& x, const GreedyConfig& cfg) {
  check_shapes(u, x);
  const int count = removal_count_for(cfg.removal_fraction, static_cast<int>(u.rows()));
  return greedy_erase_count(u, x, count, cfg.min_survivors);
}

void write_trace_csv(const GreedyTrace& trace, std::ostream& out) {
  out << "step,removed_index,ratio\n";
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    out << (k + 1) << ',' << (trace.steps[k].removed_index + 1) << ','
        << format_double(trace.steps[k].ratio) << '\n';
  }
}

}  // namespace glimps
