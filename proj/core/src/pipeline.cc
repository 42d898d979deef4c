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

#include "glimps/pipeline.h"

#include <chrono>
#include <cmath>

#include "glimps/errors.h"

namespace glimps {

Classification classify_all(const Matrix& u, const Vector& x, const Vector& theta_hat,
                            double tau) {
  if (!(tau > 0.0)) throw ConfigError("classify_all: tau must be > 0");
  if (u.rows() != x.size() || u.cols() != theta_hat.size()) {
    throw DomainError("classify_all: shape mismatch");
  }
  Classification out;
  out.residuals = Vector(abs_residuals(u.values(), x.values(), theta_hat.values()));
  out.labels.reserve(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    out.labels.push_back(out.residuals[i] <= tau ? Label::kInlier : Label::kOutlier);
  }
  return out;
}

double default_tau(const Vector& x, double lambda, std::optional<double> sigma) {
  if (std::isinf(lambda) || !sigma || *sigma == 0.0) {
    if (!std::isinf(lambda) && !sigma) {
      throw ConfigError("noisy mode needs --tau or a known sigma");
    }
    return 1e-6 * (1.0 + x.values().cwiseAbs().maxCoeff());
  }
  return 3.0 * *sigma;
}

IndexSet inlier_set(const std::vector<Label>& labels) {
  std::vector<int> members;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == Label::kInlier) members.push_back(static_cast<int>(i));
  }
  return IndexSet::from_zero_based(std::move(members));
}

WarmStart build_warm_start(const MilpProblem& p, const Vector& theta0, double tau) {
  const Eigen::VectorXd res = abs_residuals(p.basis.values(), p.obs.values(), theta0.values());
  WarmStart ws{Indicator(static_cast<std::size_t>(res.size()), 0), theta0};
  for (Eigen::Index i = 0; i < res.size(); ++i) ws.z[static_cast<std::size_t>(i)] = res[i] > tau;
  if (std::isfinite(assignment_objective(p, ws.z, ws.theta))) return ws;
  std::fill(ws.z.begin(), ws.z.end(), 1);
  return ws;
}

DetectionResult detect_on_survivors(const Matrix& u, const Vector& x, GreedyResult stage1,
                                    const GlimpsConfig& cfg, const SolverOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const auto d = x.size();
  const auto r = u.cols();
  if (u.rows() != d) throw DomainError("glimps_detect: basis rows != obs length");
  if (static_cast<Eigen::Index>(stage1.survivors.size()) < r + 1) {
    throw ConfigError("glimps_detect: fewer than r + 1 survivors");
  }

  DetectionResult out;
  out.tau = cfg.tau ? *cfg.tau : default_tau(x, cfg.lambda, cfg.sigma);
  if (!(out.tau > 0.0)) throw ConfigError("glimps_detect: tau must be > 0");
  out.survivors = std::move(stage1.survivors);
  out.stage1_trace = std::move(stage1.trace);

  const Matrix u_s = restrict_rows(u, out.survivors);
  const Vector x_s = restrict(x, out.survivors);
  const Vector theta0 = least_squares(u_s, x_s);

  MilpProblem p;
  p.basis = u_s;
  p.obs = x_s;
  p.lambda = cfg.lambda;
  p.time_limit_s = cfg.time_limit_s;
  p.gap_tol = cfg.gap_tol ? *cfg.gap_tol : (p.noiseless() ? 0.0 : 1e-6);
  p.big_m = choose_big_m(u_s, x_s, theta0, cfg.big_m_safety);
  p.warm_start = build_warm_start(p, theta0, out.tau);

  SolverOptions solver = options;
  if (!solver.deadline) {
    solver.deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                  std::chrono::duration<double>(cfg.time_limit_s));
  }
  EscalationResult esc = solve_with_escalation(p, solver, cfg.max_escalations);
  out.stage2 = std::move(esc.solution);
  out.big_m = esc.big_m;
  out.escalations = esc.escalations;

  out.stage2_labels.assign(static_cast<std::size_t>(d), Label::kOutlier);
  std::vector<int> stage2_inliers;
  if (!out.stage2.z.empty()) {
    for (std::size_t k = 0; k < out.survivors.size(); ++k) {
      if (out.stage2.z[k] == 0) {
        const int i = out.survivors[k];
        stage2_inliers.push_back(i);
        out.stage2_labels[static_cast<std::size_t>(i)] = Label::kInlier;
      }
    }
  }

  out.recovered = static_cast<Eigen::Index>(stage2_inliers.size()) >= r + 1;
  if (out.recovered) {
    const IndexSet omega = IndexSet::from_zero_based(stage2_inliers);
    try {
      out.theta_hat = least_squares(restrict_rows(u, omega), restrict(x, omega));
    } catch (const RankDeficientError&) {
      out.recovered = false;
    }
  }
  if (out.recovered) {
    Classification c = classify_all(u, x, out.theta_hat, out.tau);
    out.labels = std::move(c.labels);
    out.residuals = std::move(c.residuals);
  } else {
    out.theta_hat = out.stage2.z.empty() ? theta0 : out.stage2.theta;
    out.residuals = Vector(abs_residuals(u.values(), x.values(), out.theta_hat.values()));
    out.labels = out.stage2_labels;
  }
  out.inliers = inlier_set(out.labels);
  return out;
}

DetectionResult glimps_detect(const Matrix& u, const Vector& x, const GlimpsConfig& cfg,
                              const SolverOptions& options) {
  if (u.rows() < u.cols() + 2) throw ConfigError("glimps_detect: need d >= r + 2");
  GreedyConfig gc;
  gc.removal_fraction = cfg.removal_fraction;
  SolverOptions timed = options;
  if (!timed.deadline) {
    timed.deadline = std::chrono::steady_clock::now() +
                     std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                         std::chrono::duration<double>(cfg.time_limit_s));
  }
  return detect_on_survivors(u, x, greedy_erase(u, x, gc), cfg, timed);
}

}  // namespace glimps
