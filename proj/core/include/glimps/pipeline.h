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

#ifndef GLIMPS_PIPELINE_H_
#define GLIMPS_PIPELINE_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "glimps/greedy.h"
#include "glimps/linalg.h"
#include "glimps/milp.h"

namespace glimps {

enum class Label : std::uint8_t { kInlier, kOutlier };

struct GlimpsConfig {
  double removal_fraction = 0.40;
  double lambda = kNoiseless;
  double time_limit_s = 60.0;
  // Classification threshold. Unset: 1e-6 * (1 + max|x_i|) in noiseless
  // mode, 3 * sigma in noisy mode.
  std::optional<double> tau;
  double big_m_safety = 2.0;
  // Known inlier noise level; only used for the default tau.
  std::optional<double> sigma;
  // Unset: 0 noiseless, 1e-6 noisy.
  std::optional<double> gap_tol;
  int max_escalations = 3;
};

struct Classification {
  std::vector<Label> labels;
  Vector residuals;
};

struct DetectionResult {
  IndexSet inliers;  // over all d coordinates
  Vector theta_hat;
  Vector residuals;
  std::vector<Label> labels;
  // Labels before ambient reclassification: stage-2 verdicts on the
  // survivors, outlier for every coordinate removed in stage 1.
  std::vector<Label> stage2_labels;
  IndexSet survivors;
  GreedyTrace stage1_trace;
  MilpSolution stage2;
  double big_m = 0.0;
  int escalations = 0;
  double tau = 0.0;
  bool recovered = false;
};

Classification classify_all(const Matrix& u, const Vector& x, const Vector& theta_hat,
                            double tau);

double default_tau(const Vector& x, double lambda, std::optional<double> sigma);

IndexSet inlier_set(const std::vector<Label>& labels);

// z_i = 1 iff |x_i - u_i theta0| > tau; all-ones when that assignment
// violates the model constraints.
WarmStart build_warm_start(const MilpProblem& p, const Vector& theta0, double tau);

// Stage 2 and recovery on a given survivor set (stage 1 already done).
DetectionResult detect_on_survivors(const Matrix& u, const Vector& x, GreedyResult stage1,
                                    const GlimpsConfig& cfg,
                                    const SolverOptions& options = {});

DetectionResult glimps_detect(const Matrix& u, const Vector& x, const GlimpsConfig& cfg,
                              const SolverOptions& options = {});

}  // namespace glimps

#endif  // GLIMPS_PIPELINE_H_
