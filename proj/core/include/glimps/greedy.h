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
#ifndef GLIMPS_GREEDY_H_
#define GLIMPS_GREEDY_H_

#include <iosfwd>
#include <vector>

#include "glimps/linalg.h"

namespace glimps {

// Candidate ratios closer than this to the best one are ties; ties go to the
// smallest coordinate index.
inline constexpr double kRatioTieTol = 1e-12;

struct GreedyStep {
  int removed_index = 0;  // zero-based
  double ratio = 0.0;
  int active_count_before = 0;
};

struct GreedyTrace {
  std::vector<GreedyStep> steps;
  // Number of candidate projections evaluated over all steps.
  long projection_calls = 0;
};

struct GreedyConfig {
  // Fraction of the ambient dimension d to remove; the count is
  // floor(removal_fraction * d).
  double removal_fraction = 0.4;
  // Floor on surviving coordinates, in addition to the r + 1 floor.
  int min_survivors = 0;
};

struct Removal {
  int index = 0;
  double ratio = 0.0;
};

struct GreedyResult {
  IndexSet survivors;
  GreedyTrace trace;
};

// Coordinate of `active` whose removal leaves x closest to span(u) in the
// projection-ratio sense. Requires |active| >= r + 2. Throws
// DegenerateActiveSetError if every candidate restriction is rank deficient.
Removal best_removal(const Matrix& u, const Vector& x, const IndexSet& active,
                     long* projection_calls = nullptr);

// Greedy erasure: removes floor(removal_fraction * d) coordinates one at a
// time. Throws ConfigError if fewer than max(min_survivors, r + 1)
// coordinates would survive.
GreedyResult greedy_erase(const Matrix& u, const Vector& x, const GreedyConfig& cfg);

// Same, with an explicit removal count.
GreedyResult greedy_erase_count(const Matrix& u, const Vector& x, int removal_count,
                                int min_survivors = 0);

int removal_count_for(double removal_fraction, int d);

// CSV with header "step,removed_index,ratio"; steps and indices one-based.
void write_trace_csv(const GreedyTrace& trace, std::ostream& out);

}  // namespace glimps

#endif  // GLIMPS_GREEDY_H_
