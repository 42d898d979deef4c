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

#ifndef GLIMPS_LINALG_H_
#define GLIMPS_LINALG_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace glimps {

// Relative threshold on the pivots of the column-pivoted QR used to decide
// numerical rank: a pivot counts if it exceeds kRankTol times the largest one.
inline constexpr double kRankTol = 1e-10;

// Dense real matrix with at least one row and one column and finite entries.
// A default-constructed Matrix is an empty placeholder.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(Eigen::MatrixXd values);

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  Eigen::Index rows() const noexcept { return values_.rows(); }
  Eigen::Index cols() const noexcept { return values_.cols(); }
  bool empty() const noexcept { return values_.size() == 0; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }
  const Eigen::MatrixXd& values() const noexcept { return values_; }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.values_.rows() == b.values_.rows() &&
           a.values_.cols() == b.values_.cols() && a.values_ == b.values_;
  }

 private:
  Eigen::MatrixXd values_;
};

// Dense real vector with at least one finite entry.
class Vector {
 public:
  Vector() = default;
  explicit Vector(Eigen::VectorXd values);

  static Vector from_list(std::initializer_list<double> values);
  static Vector zeros(Eigen::Index n);

  Eigen::Index size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.size() == 0; }
  double operator[](Eigen::Index i) const { return values_[i]; }
  const Eigen::VectorXd& values() const noexcept { return values_; }
  std::vector<double> to_std() const;

  friend bool operator==(const Vector& a, const Vector& b) {
    return a.values_.size() == b.values_.size() && a.values_ == b.values_;
  }

 private:
  Eigen::VectorXd values_;
};

// Strictly increasing set of coordinates. Stored zero-based; the text
// interfaces (CSV, CLI) are one-based.
class IndexSet {
 public:
  IndexSet() = default;

  // Throws DomainError unless members are strictly increasing and >= 0.
  static IndexSet from_zero_based(std::vector<int> members);
  static IndexSet from_one_based(const std::vector<int>& members);
  // Sorts and removes duplicates first.
  static IndexSet from_unsorted(std::vector<int> members);
  // {0, 1, ..., n-1}.
  static IndexSet range(int n);

  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  int operator[](std::size_t k) const { return members_[k]; }
  int max() const { return members_.back(); }
  std::span<const int> members() const noexcept { return members_; }
  std::vector<int> one_based() const;
  auto begin() const noexcept { return members_.begin(); }
  auto end() const noexcept { return members_.end(); }

  bool contains(int i) const;
  IndexSet without(int i) const;
  // Members of {0..n-1} not in this set.
  IndexSet complement(int n) const;

  friend bool operator==(const IndexSet&, const IndexSet&) = default;

 private:
  std::vector<int> members_;
};

Matrix restrict_rows(const Matrix& m, const IndexSet& idx);
Vector restrict(const Vector& v, const IndexSet& idx);

// argmin_theta ||a theta - b||_2 via column-pivoted Householder QR.
// Throws RankDeficientError when rank(a) < a.cols().
Vector least_squares(const Matrix& a, const Vector& b);

// Orthogonal projection of v onto the column space of u.
Vector project_onto_subspace(const Matrix& u, const Vector& v);

// ||P_u v|| / ||v||. Throws ZeroVectorError for v == 0.
double projection_ratio(const Matrix& u, const Vector& v);

// |x_i - u_i theta| for every row.
Eigen::VectorXd abs_residuals(const Eigen::MatrixXd& u, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& theta);

namespace detail {

// Unchecked kernels shared by the greedy scan and the solvers. They return
// false instead of throwing when the restriction is rank deficient.
bool least_squares_into(const Eigen::Ref<const Eigen::MatrixXd>& a,
                        const Eigen::Ref<const Eigen::VectorXd>& b,
                        Eigen::VectorXd& theta, int* rank = nullptr);

bool projection_norm(const Eigen::Ref<const Eigen::MatrixXd>& u,
                     const Eigen::Ref<const Eigen::VectorXd>& v, double& norm);

}  // namespace detail

}  // namespace glimps

#endif  // GLIMPS_LINALG_H_
