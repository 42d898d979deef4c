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

#include "glimps/mps.h"

#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "glimps/csv_io.h"
#include "glimps/errors.h"

namespace glimps {
namespace {

std::string field_line(std::string_view col, std::string_view row, double value) {
  return fmt::format("    {:<8}  {:<8}  {}\n", col, row, format_double(value));
}

}  // namespace

void write_mps(const MilpProblem& p, std::ostream& out, std::string_view name) {
  if (!p.noiseless()) throw ConfigError("export_mps: only the noiseless model is linear");
  if (p.basis.rows() != p.obs.size()) throw DomainError("export_mps: shape mismatch");
  const auto n = p.basis.rows();
  const auto r = p.basis.cols();

  out << fmt::format("NAME          {}\n", name);
  out << "ROWS\n N  OBJ\n";
  for (Eigen::Index i = 1; i <= n; ++i) out << fmt::format(" L  P{}\n L  N{}\n", i, i);

  out << "COLUMNS\n";
  for (Eigen::Index j = 0; j < r; ++j) {
    const std::string col = fmt::format("T{}", j + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a = p.basis(i, j);
      if (a == 0.0) continue;
      out << field_line(col, fmt::format("P{}", i + 1), a);
      out << field_line(col, fmt::format("N{}", i + 1), -a);
    }
  }
  out << "    MARKER                 'MARKER'                 'INTORG'\n";
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::string col = fmt::format("Z{}", i + 1);
    out << field_line(col, "OBJ", 1.0);
    out << field_line(col, fmt::format("P{}", i + 1), -p.big_m);
    out << field_line(col, fmt::format("N{}", i + 1), -p.big_m);
  }
  out << "    MARKER                 'MARKER'                 'INTEND'\n";

  out << "RHS\n";
  for (Eigen::Index i = 0; i < n; ++i) {
    if (p.obs[i] == 0.0) continue;
    out << field_line("RHS", fmt::format("P{}", i + 1), p.obs[i]);
    out << field_line("RHS", fmt::format("N{}", i + 1), -p.obs[i]);
  }

  out << "BOUNDS\n";
  for (Eigen::Index j = 0; j < r; ++j) out << fmt::format(" FR BND       T{}\n", j + 1);
  for (Eigen::Index i = 0; i < n; ++i) out << fmt::format(" BV BND       Z{}\n", i + 1);
  out << "ENDATA\n";
}

void export_mps(const MilpProblem& p, const std::filesystem::path& path) {
  if (path.empty()) throw IoError("export_mps: empty path");
  std::ostringstream buf;
  write_mps(p, buf);
  std::ofstream out(path);
  if (!out) throw IoError("export_mps: cannot open " + path.string());
  out << buf.str();
  out.flush();
  if (!out) throw IoError("export_mps: write failed for " + path.string());
}

MpsModel parse_mps(std::istream& in) {
  enum class Section { kNone, kRows, kColumns, kRhs, kBounds };
  struct RowInfo {
    char type;
    int index;  // -1 for the objective
  };

  MpsModel model;
  std::map<std::string, RowInfo> rows;
  std::map<std::string, int> cols;
  std::string objective_row;
  std::vector<char> row_types;
  std::vector<std::map<int, double>> entries;  // per column: row -> value
  std::vector<double> obj;
  std::vector<double> rhs;
  std::vector<double> lower;
  std::vector<double> upper;
  bool in_integer = false;
  Section section = Section::kNone;

  auto fail = [](const std::string& what) { throw IoError("read_mps: " + what); };
  auto row_of = [&](const std::string& name) -> const RowInfo& {
    const auto it = rows.find(name);
    if (it == rows.end()) fail("unknown row " + name);
    return it->second;
  };

  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '*') continue;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (line[0] != ' ' && line[0] != '\t') {
      const std::string& head = tok[0];
      if (head == "NAME") {
        model.name = tok.size() > 1 ? tok[1] : "";
      } else if (head == "ROWS") {
        section = Section::kRows;
      } else if (head == "COLUMNS") {
        section = Section::kColumns;
      } else if (head == "RHS") {
        section = Section::kRhs;
      } else if (head == "BOUNDS") {
        section = Section::kBounds;
      } else if (head == "ENDATA") {
        break;
      } else {
        fail("unsupported section " + head);
      }
      continue;
    }
    switch (section) {
      case Section::kRows: {
        if (tok.size() != 2) fail("bad ROWS line: " + line);
        const char type = tok[0][0];
        if (type == 'N') {
          if (objective_row.empty()) objective_row = tok[1];
          rows[tok[1]] = RowInfo{'N', -1};
        } else if (type == 'L' || type == 'G' || type == 'E') {
          rows[tok[1]] = RowInfo{type, static_cast<int>(row_types.size())};
          row_types.push_back(type);
          model.row_names.push_back(tok[1]);
        } else {
          fail("bad row type " + tok[0]);
        }
        break;
      }
      case Section::kColumns: {
        if (tok.size() >= 3 && tok[1] == "'MARKER'") {
          if (tok[2] == "'INTORG'") in_integer = true;
          else if (tok[2] == "'INTEND'") in_integer = false;
          else fail("bad marker " + tok[2]);
          break;
        }
        if (tok.size() != 3 && tok.size() != 5) fail("bad COLUMNS line: " + line);
        auto [it, inserted] = cols.try_emplace(tok[0], static_cast<int>(entries.size()));
        if (inserted) {
          entries.emplace_back();
          obj.push_back(0.0);
          lower.push_back(0.0);
          upper.push_back(lp::kInf);
          model.integer.push_back(in_integer);
          model.col_names.push_back(tok[0]);
        }
        const int c = it->second;
        for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
          const RowInfo& ri = row_of(tok[k]);
          const double v = parse_double(tok[k + 1]);
          if (ri.index < 0) {
            if (tok[k] == objective_row) obj[static_cast<std::size_t>(c)] = v;
          } else {
            entries[static_cast<std::size_t>(c)][ri.index] = v;
          }
        }
        break;
      }
      case Section::kRhs: {
        if (tok.size() != 3 && tok.size() != 5) fail("bad RHS line: " + line);
        rhs.resize(row_types.size(), 0.0);
        for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
          const RowInfo& ri = row_of(tok[k]);
          if (ri.index >= 0) rhs[static_cast<std::size_t>(ri.index)] = parse_double(tok[k + 1]);
        }
        break;
      }
      case Section::kBounds: {
        if (tok.size() < 3) fail("bad BOUNDS line: " + line);
        const auto it = cols.find(tok[2]);
        if (it == cols.end()) fail("unknown column " + tok[2]);
        const auto c = static_cast<std::size_t>(it->second);
        const std::string& type = tok[0];
        const bool has_value = tok.size() >= 4;
        const double v = has_value ? parse_double(tok[3]) : 0.0;
        if ((type == "UP" || type == "LO" || type == "FX") && !has_value) {
          fail("bound without value: " + line);
        }
        if (type == "UP") {
          upper[c] = v;
          if (v < 0.0 && lower[c] == 0.0) lower[c] = -lp::kInf;
        } else if (type == "LO") {
          lower[c] = v;
        } else if (type == "FX") {
          lower[c] = upper[c] = v;
        } else if (type == "FR") {
          lower[c] = -lp::kInf;
          upper[c] = lp::kInf;
        } else if (type == "MI") {
          lower[c] = -lp::kInf;
        } else if (type == "PL") {
          upper[c] = lp::kInf;
        } else if (type == "BV") {
          lower[c] = 0.0;
          upper[c] = 1.0;
          model.integer[c] = true;
        } else {
          fail("unsupported bound type " + type);
        }
        break;
      }
      case Section::kNone:
        fail("data before any section: " + line);
    }
  }
  if (objective_row.empty()) fail("missing objective row");

  const auto m = static_cast<Eigen::Index>(row_types.size());
  const auto ncols = static_cast<Eigen::Index>(entries.size());
  rhs.resize(row_types.size(), 0.0);
  model.lp = lp::LinearProgram(m, ncols);
  for (Eigen::Index c = 0; c < ncols; ++c) {
    const auto cs = static_cast<std::size_t>(c);
    for (const auto& [row, v] : entries[cs]) model.lp.constraints(row, c) = v;
    model.lp.objective[c] = obj[cs];
    model.lp.col_lower[c] = lower[cs];
    model.lp.col_upper[c] = upper[cs];
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    const double b = rhs[static_cast<std::size_t>(i)];
    switch (row_types[static_cast<std::size_t>(i)]) {
      case 'L': model.lp.row_upper[i] = b; break;
      case 'G': model.lp.row_lower[i] = b; break;
      default: model.lp.row_lower[i] = model.lp.row_upper[i] = b; break;
    }
  }
  return model;
}

MpsModel read_mps(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("read_mps: cannot open " + path.string());
  return parse_mps(in);
}

}  // namespace glimps
