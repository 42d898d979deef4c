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

#include "glimps/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "glimps/errors.h"

namespace glimps {
namespace {

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> out(v.size());
  std::size_t k = 0;
  while (k < order.size()) {
    std::size_t l = k;
    while (l + 1 < order.size() && v[order[l + 1]] == v[order[k]]) ++l;
    const double avg = 0.5 * static_cast<double>(k + l) + 1.0;
    for (std::size_t m = k; m <= l; ++m) out[order[m]] = avg;
    k = l + 1;
  }
  return out;
}

}  // namespace

double coef_error(const Vector& theta, const Vector& theta_hat) {
  if (theta.size() != theta_hat.size()) throw DomainError("coef_error: length mismatch");
  const double denom = theta.values().norm() + theta_hat.values().norm();
  if (denom == 0.0) return 0.0;
  return (theta.values() - theta_hat.values()).norm() / denom;
}

double misclass_ratio(std::span<const std::uint8_t> outlier_mask,
                      const std::vector<Label>& labels) {
  if (outlier_mask.size() != labels.size()) throw DomainError("misclass_ratio: length mismatch");
  std::size_t inliers = 0;
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool outlier = outlier_mask[i] != 0;
    if (!outlier) ++inliers;
    if (outlier != (labels[i] == Label::kOutlier)) ++wrong;
  }
  if (inliers == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(wrong) / static_cast<double>(inliers);
}

bool trial_success(double coef_error, double sigma) {
  return sigma > 0.0 ? coef_error < 10.0 * sigma : coef_error < 1e-6;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DomainError("spearman: length mismatch");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (a.size() < 2) return nan;
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return nan;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace glimps
