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

#ifndef GLIMPS_MPS_H_
#define GLIMPS_MPS_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "glimps/lp.h"
#include "glimps/milp.h"

namespace glimps {

struct MpsModel {
  std::string name;
  lp::LinearProgram lp;
  std::vector<bool> integer;
  std::vector<std::string> row_names;
  std::vector<std::string> col_names;
};

// Fixed-format MPS of the noiseless big-M model. Columns T1..Tr are free,
// Z1..Zn binary; rows P<i> and N<i> bound the residual from above and below.
// Numbers are written in shortest round-trip form and may overrun the
// nominal 12-character field.
void write_mps(const MilpProblem& p, std::ostream& out, std::string_view name = "GLIMPS");
void export_mps(const MilpProblem& p, const std::filesystem::path& path);

// Whitespace-tokenized reader; supports N/L/G/E rows, RHS and the bound
// types UP LO FX FR MI PL BV. RANGES is rejected.
MpsModel parse_mps(std::istream& in);
MpsModel read_mps(const std::filesystem::path& path);

}  // namespace glimps

#endif  // GLIMPS_MPS_H_
