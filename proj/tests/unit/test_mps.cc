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

#include <algorithm>
#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "glimps/errors.h"
#include "glimps/lp.h"
#include "glimps/mps.h"
#include "oracles.h"

namespace glimps {
namespace {

MilpProblem example(double big_m) {
  MilpProblem p;
  p.basis = Matrix::from_rows({{1, 0}, {3, 2}, {5, 4}, {7, 6}, {9, 8}});
  p.obs = Vector::from_list({4, 14, 0, 34, 44});
  p.big_m = big_m;
  return p;
}

MpsModel round_trip(const MilpProblem& p) {
  std::stringstream s;
  write_mps(p, s, "EX");
  return parse_mps(s);
}

TEST(Mps, ExampleStructure) {
  const MpsModel m = round_trip(example(100.0));
  EXPECT_EQ(m.name, "EX");
  EXPECT_EQ(m.lp.num_rows(), 10);
  EXPECT_EQ(m.lp.num_cols(), 7);
  int binary = 0;
  int free = 0;
  for (Eigen::Index j = 0; j < 7; ++j) {
    if (m.integer[static_cast<std::size_t>(j)]) {
      ++binary;
      EXPECT_EQ(m.lp.col_lower[j], 0.0);
      EXPECT_EQ(m.lp.col_upper[j], 1.0);
    } else {
      ++free;
      EXPECT_TRUE(std::isinf(m.lp.col_lower[j]) && m.lp.col_lower[j] < 0);
      EXPECT_TRUE(std::isinf(m.lp.col_upper[j]) && m.lp.col_upper[j] > 0);
    }
  }
  EXPECT_EQ(binary, 5);
  EXPECT_EQ(free, 2);
}

TEST(Mps, RelaxationRoundTrip) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = oracle::planted(12, 3, 0.4, 40 + seed);
    MilpProblem p;
    p.basis = Matrix(inst.u);
    p.obs = Vector(inst.x);
    p.big_m = 7.25 + static_cast<double>(seed) / 3.0;
    const MpsModel m = round_trip(p);
    lp::LinearProgram read = m.lp;
    const lp::LpSolution a = lp::solve(read);
    const lp::LpSolution b = lp::solve(big_m_relaxation(p));
    ASSERT_EQ(a.status, lp::LpStatus::kOptimal);
    ASSERT_EQ(b.status, lp::LpStatus::kOptimal);
    EXPECT_NEAR(a.objective, b.objective, 1e-8);
  }
}

TEST(Mps, CoefficientsSurviveExactly) {
  MilpProblem p = example(0.1 + 0.2);
  p.obs = Vector::from_list({1.0 / 3.0, 14, 0, 34, 1e-17});
  const MpsModel m = round_trip(p);
  const auto direct = big_m_relaxation(p);
  EXPECT_EQ(m.lp.constraints, direct.constraints);
  EXPECT_EQ(m.lp.row_upper, direct.row_upper);
  EXPECT_EQ(m.lp.objective, direct.objective);
}

TEST(Mps, ParsesGeneralSections) {
  std::istringstream in(R"(NAME          SMALL
ROWS
 N  COST
 L  LIM1
 G  LIM2
 E  MYEQN
COLUMNS
    X1        COST         1.0   LIM1         1.0
    X1        LIM2         1.0
    X2        COST         2.0   LIM1         1.0
    X2        MYEQN       -1.0
    X3        COST        -1.0   MYEQN        1.0
RHS
    RHS       LIM1         4.0   LIM2         1.0
    RHS       MYEQN        7.0
BOUNDS
 UP BND       X1           4.0
 MI BND       X2
 FX BND       X3           3.5
ENDATA
)");
  const MpsModel m = parse_mps(in);
  EXPECT_EQ(m.name, "SMALL");
  ASSERT_EQ(m.lp.num_rows(), 3);
  ASSERT_EQ(m.lp.num_cols(), 3);
  EXPECT_EQ(m.row_names, (std::vector<std::string>{"LIM1", "LIM2", "MYEQN"}));
  EXPECT_EQ(m.col_names, (std::vector<std::string>{"X1", "X2", "X3"}));
  EXPECT_EQ(m.lp.objective, Eigen::Vector3d(1, 2, -1));
  EXPECT_EQ(m.lp.row_upper[0], 4.0);
  EXPECT_TRUE(std::isinf(m.lp.row_lower[0]));
  EXPECT_EQ(m.lp.row_lower[1], 1.0);
  EXPECT_EQ(m.lp.row_lower[2], 7.0);
  EXPECT_EQ(m.lp.row_upper[2], 7.0);
  EXPECT_EQ(m.lp.col_upper[0], 4.0);
  EXPECT_EQ(m.lp.col_lower[0], 0.0);
  EXPECT_TRUE(std::isinf(m.lp.col_lower[1]));
  EXPECT_EQ(m.lp.col_lower[2], 3.5);
  EXPECT_EQ(m.lp.col_upper[2], 3.5);
}

TEST(Mps, RejectsMalformedInput) {
  std::istringstream ranges("NAME X\nROWS\n N C\n L R\nCOLUMNS\n X C 1 R 1\nRHS\nRANGES\n"
                            " RNG R 2\nENDATA\n");
  EXPECT_THROW(parse_mps(ranges), IoError);
  std::istringstream unknown_row("NAME X\nROWS\n N C\nCOLUMNS\n X C 1 Q 1\nENDATA\n");
  EXPECT_THROW(parse_mps(unknown_row), IoError);
  EXPECT_THROW(read_mps("/nonexistent/dir/model.mps"), IoError);
}

TEST(Mps, ExportErrors) {
  EXPECT_THROW(export_mps(example(10.0), ""), IoError);
  MilpProblem noisy = example(10.0);
  noisy.lambda = 5.0;
  EXPECT_THROW(export_mps(noisy, "/tmp/never.mps"), ConfigError);
  EXPECT_THROW(export_mps(example(10.0), "/nonexistent/dir/model.mps"), IoError);
}

TEST(Mps, ExportAndReadFile) {
  const auto path = std::filesystem::temp_directory_path() / "glimps_test_model.mps";
  export_mps(example(100.0), path);
  const MpsModel m = read_mps(path);
  EXPECT_EQ(m.lp.num_rows(), 10);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace glimps
