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
#ifndef GLIMPS_CSV_IO_H_
#define GLIMPS_CSV_IO_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "glimps/linalg.h"

namespace glimps {

// Plain numeric CSV: no header, one line per matrix row, comma separated.
// Blank lines are skipped. Throws IoError on unreadable files and
// DomainError on malformed or ragged content.
Matrix read_matrix_csv(const std::filesystem::path& path);
Matrix parse_matrix_csv(std::istream& in);

// Accepts either one value per line or a single comma-separated line.
Vector read_vector_csv(const std::filesystem::path& path);
Vector parse_vector_csv(std::istream& in);

void write_matrix_csv(const Matrix& m, std::ostream& out);
void write_vector_csv(const Vector& v, std::ostream& out);
void write_matrix_csv(const Matrix& m, const std::filesystem::path& path);
void write_vector_csv(const Vector& v, const std::filesystem::path& path);

// Shortest representation that round-trips to the same double.
std::string format_double(double v);

// Splits one CSV line on commas, trimming surrounding whitespace.
std::vector<std::string> split_csv_line(const std::string& line);

double parse_double(const std::string& field);

}  // namespace glimps

#endif  // GLIMPS_CSV_IO_H_
