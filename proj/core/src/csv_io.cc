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

#include "glimps/csv_io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "glimps/errors.h"

namespace glimps {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.empty()) throw IoError("empty output path");
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::vector<std::vector<double>> parse_rows(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<double> row;
    for (const auto& field : split_csv_line(line)) row.push_back(parse_double(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& field) {
  if (field == "nan" || field == "NaN") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  if (!field.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || field.empty()) {
    throw DomainError("not a number: '" + field + "'");
  }
  return v;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

Matrix parse_matrix_csv(std::istream& in) {
  const auto rows = parse_rows(in);
  if (rows.empty()) throw DomainError("empty matrix CSV");
  const auto n_cols = rows.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(n_cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != n_cols) {
      throw DomainError("ragged matrix CSV at row " + std::to_string(i + 1));
    }
    for (std::size_t j = 0; j < n_cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return Matrix(std::move(m));
}

Vector parse_vector_csv(std::istream& in) {
  const auto rows = parse_rows(in);
  if (rows.empty()) throw DomainError("empty vector CSV");
  std::vector<double> values;
  if (rows.size() == 1) {
    values = rows.front();
  } else {
    for (const auto& row : rows) {
      if (row.size() != 1) throw DomainError("vector CSV must have one column");
      values.push_back(row.front());
    }
  }
  return Vector(Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                  static_cast<Eigen::Index>(values.size())));
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  return parse_matrix_csv(in);
}

Vector read_vector_csv(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  return parse_vector_csv(in);
}

void write_matrix_csv(const Matrix& m, std::ostream& out) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

void write_vector_csv(const Vector& v, std::ostream& out) {
  for (Eigen::Index i = 0; i < v.size(); ++i) out << format_double(v[i]) << '\n';
}

void write_matrix_csv(const Matrix& m, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  write_matrix_csv(m, out);
}

void write_vector_csv(const Vector& v, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  write_vector_csv(v, out);
}

}  // namespace glimps
