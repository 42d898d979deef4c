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

#ifndef GLIMPS_SYNTH_H_
#define GLIMPS_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "glimps/linalg.h"

namespace glimps {

struct InstanceSpec {
  int d = 100;
  int r = 5;
  double p = 0.0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

struct Instance {
  Matrix u;
  Vector x;
  Vector theta_true;
  std::vector<std::uint8_t> outlier_mask;  // 1 = replaced by an outlier
};

// Draw order from one mt19937_64 stream seeded with spec.seed: u row by
// row, theta, then per coordinate the noise, the replacement coin and the
// replacement value. Every draw is made regardless of p and sigma, so
// instances with the same seed share u, theta and nested outlier masks.
Instance generate(const InstanceSpec& spec);

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t v);

// Per-trial seed from the sweep seed, the grid point and the trial index.
std::uint64_t trial_seed(std::uint64_t base_seed, int d, int r, double p, double sigma,
                         int trial);

// "kind,index,value" rows: theta (1-based component), mask (1-based
// coordinate, 0/1).
void write_truth_csv(const Instance& inst, std::ostream& out);
void write_truth_csv(const Instance& inst, const std::filesystem::path& path);

}  // namespace glimps

#endif  // GLIMPS_SYNTH_H_
