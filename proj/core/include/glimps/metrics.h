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

#ifndef GLIMPS_METRICS_H_
#define GLIMPS_METRICS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "glimps/linalg.h"
#include "glimps/pipeline.h"

namespace glimps {

// ||theta - theta_hat|| / (||theta|| + ||theta_hat||); 0 when both are zero.
double coef_error(const Vector& theta, const Vector& theta_hat);

// Mislabelled coordinates divided by the number of true inliers. NaN when
// there are no true inliers. outlier_mask: 1 = true outlier.
double misclass_ratio(std::span<const std::uint8_t> outlier_mask,
                      const std::vector<Label>& labels);

// Success thresholds: coef_error < 1e-6 without noise, < 10 sigma with it.
bool trial_success(double coef_error, double sigma);

// Spearman rank correlation with average ranks for ties. NaN if either
// input is constant or fewer than two pairs are given.
double spearman(std::span<const double> a, std::span<const double> b);

}  // namespace glimps

#endif  // GLIMPS_METRICS_H_
