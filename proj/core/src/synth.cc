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

#include "glimps/synth.h"

#include <bit>
#include <cmath>
#include <fstream>
#include <ostream>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "glimps/csv_io.h"
#include "glimps/errors.h"

namespace glimps {

Instance generate(const InstanceSpec& spec) {
  if (spec.r < 1 || spec.d <= spec.r) throw ConfigError("generate: need 1 <= r < d");
  if (!(spec.p >= 0.0 && spec.p <= 1.0)) throw ConfigError("generate: p must be in [0, 1]");
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma)) {
    throw ConfigError("generate: sigma must be >= 0");
  }
  boost::random::mt19937_64 rng(spec.seed);
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  boost::random::uniform_01<double> coin;

  Eigen::MatrixXd u(spec.d, spec.r);
  for (int i = 0; i < spec.d; ++i) {
    for (int j = 0; j < spec.r; ++j) u(i, j) = normal(rng);
  }
  Eigen::VectorXd theta(spec.r);
  for (int j = 0; j < spec.r; ++j) theta[j] = normal(rng);

  Eigen::VectorXd x = u * theta;
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(spec.d), 0);
  for (int i = 0; i < spec.d; ++i) {
    const double noise = normal(rng);
    const double flip = coin(rng);
    const double outlier = normal(rng);
    if (flip < spec.p) {
      x[i] = outlier;
      mask[static_cast<std::size_t>(i)] = 1;
    } else {
      x[i] += spec.sigma * noise;
    }
  }
  return Instance{Matrix(std::move(u)), Vector(std::move(x)), Vector(std::move(theta)),
                  std::move(mask)};
}

std::uint64_t mix64(std::uint64_t v) {
  v += 0x9e3779b97f4a7c15ULL;
  v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
  v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
  return v ^ (v >> 31);
}

std::uint64_t trial_seed(std::uint64_t base_seed, int d, int r, double p, double sigma,
                         int trial) {
  std::uint64_t h = mix64(base_seed);
  for (std::uint64_t part : {static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(r),
                             std::bit_cast<std::uint64_t>(p), std::bit_cast<std::uint64_t>(sigma),
                             static_cast<std::uint64_t>(trial)}) {
    h = mix64(h ^ part);
  }
  return h;
}

void write_truth_csv(const Instance& inst, std::ostream& out) {
  out << "kind,index,value\n";
  for (Eigen::Index j = 0; j < inst.theta_true.size(); ++j) {
    out << "theta," << j + 1 << ',' << format_double(inst.theta_true[j]) << '\n';
  }
  for (std::size_t i = 0; i < inst.outlier_mask.size(); ++i) {
    out << "mask," << i + 1 << ',' << static_cast<int>(inst.outlier_mask[i]) << '\n';
  }
}

void write_truth_csv(const Instance& inst, const std::filesystem::path& path) {
  if (path.empty()) throw IoError("write_truth_csv: empty path");
  std::ofstream out(path);
  if (!out) throw IoError("write_truth_csv: cannot open " + path.string());
  write_truth_csv(inst, out);
  if (!out) throw IoError("write_truth_csv: write failed for " + path.string());
}

}  // namespace glimps
