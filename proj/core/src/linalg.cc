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

#include "glimps/linalg.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "glimps/errors.h"

namespace glimps {
namespace {

template <typename Derived>
void require_finite(const Eigen::DenseBase<Derived>& values, const char* what) {
  if (!values.allFinite()) {
    throw DomainError(std::string(what) + " has non-finite entries");
  }
}

void check_indices(const IndexSet& idx, Eigen::Index bound) {
  if (idx.empty()) throw DomainError("empty index set");
  if (idx.max() >= bound) {
    throw DomainError("index " + std::to_string(idx.max() + 1) +
                      " out of range (dimension " + std::to_string(bound) + ")");
  }
}

}  // namespace

Matrix::Matrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw DomainError("matrix must have at least one row and one column");
  }
  require_finite(values_, "matrix");
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const auto n_rows = static_cast<Eigen::Index>(rows.size());
  const auto n_cols = n_rows > 0 ? static_cast<Eigen::Index>(rows.begin()->size()) : 0;
  Eigen::MatrixXd values(n_rows, n_cols);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    if (static_cast<Eigen::Index>(row.size()) != n_cols) {
      throw DomainError("ragged matrix rows");
    }
    Eigen::Index j = 0;
    for (double v : row) values(i, j++) = v;
    ++i;
  }
  return Matrix(std::move(values));
}

Vector::Vector(Eigen::VectorXd values) : values_(std::move(values)) {
  if (values_.size() < 1) throw DomainError("vector must be nonempty");
  require_finite(values_, "vector");
}

Vector Vector::from_list(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return Vector(std::move(v));
}

Vector Vector::zeros(Eigen::Index n) { return Vector(Eigen::VectorXd::Zero(n)); }

std::vector<double> Vector::to_std() const {
  return {values_.data(), values_.data() + values_.size()};
}

IndexSet IndexSet::from_zero_based(std::vector<int> members) {
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (members[k] < 0) throw DomainError("negative coordinate index");
    if (k > 0 && members[k] <= members[k - 1]) {
      throw DomainError("index set must be strictly increasing");
    }
  }
  IndexSet out;
  out.members_ = std::move(members);
  return out;
}

IndexSet IndexSet::from_one_based(const std::vector<int>& members) {
  std::vector<int> zero_based;
  zero_based.reserve(members.size());
  for (int m : members) {
    if (m < 1) throw DomainError("one-based index must be >= 1");
    zero_based.push_back(m - 1);
  }
  return from_zero_based(std::move(zero_based));
}

IndexSet IndexSet::from_unsorted(std::vector<int> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  return from_zero_based(std::move(members));
}

IndexSet IndexSet::range(int n) {
  IndexSet out;
  out.members_.resize(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) out.members_[static_cast<std::size_t>(i)] = i;
  return out;
}

std::vector<int> IndexSet::one_based() const {
  std::vector<int> out(members_);
  for (int& m : out) ++m;
  return out;
}

bool IndexSet::contains(int i) const {
  return std::binary_search(members_.begin(), members_.end(), i);
}

IndexSet IndexSet::without(int i) const {
  IndexSet out;
  out.members_.reserve(members_.size());
  for (int m : members_) {
    if (m != i) out.members_.push_back(m);
  }
  return out;
}

IndexSet IndexSet::complement(int n) const {
  IndexSet out;
  auto it = members_.begin();
  for (int i = 0; i < n; ++i) {
    if (it != members_.end() && *it == i) {
      ++it;
    } else {
      out.members_.push_back(i);
    }
  }
  return out;
}

Matrix restrict_rows(const Matrix& m, const IndexSet& idx) {
  check_indices(idx, m.rows());
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    out.row(static_cast<Eigen::Index>(k)) = m.values().row(idx[k]);
  }
  return Matrix(std::move(out));
}

Vector restrict(const Vector& v, const IndexSet& idx) {
  check_indices(idx, v.size());
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    out[static_cast<Eigen::Index>(k)] = v[idx[k]];
  }
  return Vector(std::move(out));
}

namespace detail {

bool least_squares_into(const Eigen::Ref<const Eigen::MatrixXd>& a,
                        const Eigen::Ref<const Eigen::VectorXd>& b,
                        Eigen::VectorXd& theta, int* rank) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(kRankTol);
  const int r = static_cast<int>(qr.rank());
  if (rank != nullptr) *rank = r;
  if (r < a.cols()) return false;
  theta = qr.solve(b);
  return true;
}

bool projection_norm(const Eigen::Ref<const Eigen::MatrixXd>& u,
                     const Eigen::Ref<const Eigen::VectorXd>& v, double& norm) {
  Eigen::VectorXd theta;
  if (!least_squares_into(u, v, theta)) return false;
  norm = (u * theta).norm();
  return true;
}

}  // namespace detail

Vector least_squares(const Matrix& a, const Vector& b) {
  if (a.rows() != b.size()) throw DomainError("least_squares: row count mismatch");
  Eigen::VectorXd theta;
  int rank = 0;
  if (!detail::least_squares_into(a.values(), b.values(), theta, &rank)) {
    throw RankDeficientError(rank, static_cast<int>(a.cols()));
  }
  return Vector(std::move(theta));
}

Vector project_onto_subspace(const Matrix& u, const Vector& v) {
  const Vector theta = least_squares(u, v);
  return Vector(u.values() * theta.values());
}

double projection_ratio(const Matrix& u, const Vector& v) {
  const double denom = v.values().norm();
  if (denom == 0.0) throw ZeroVectorError();
  return project_onto_subspace(u, v).values().norm() / denom;
}

Eigen::VectorXd abs_residuals(const Eigen::MatrixXd& u, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& theta) {
  return (x - u * theta).cwiseAbs();
}

}  // namespace glimps
