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

#ifndef GLIMPS_ERRORS_H_
#define GLIMPS_ERRORS_H_

#include <stdexcept>
#include <string>

namespace glimps {

// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: empty or out-of-range index sets, non-finite entries,
// shape mismatches.
class DomainError : public Error {
 public:
  using Error::Error;
};

class RankDeficientError : public Error {
 public:
  RankDeficientError(int estimated_rank, int required_rank)
      : Error("rank-deficient matrix: estimated rank " +
              std::to_string(estimated_rank) + ", need " +
              std::to_string(required_rank)),
        estimated_rank_(estimated_rank) {}

  int estimated_rank() const noexcept { return estimated_rank_; }

 private:
  int estimated_rank_;
};

class ZeroVectorError : public Error {
 public:
  ZeroVectorError() : Error("projection ratio of a zero vector is undefined") {}
};

// Every single-coordinate removal from the active set leaves a
// rank-deficient restriction.
class DegenerateActiveSetError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Exhaustive enumeration would exceed its configured budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

}  // namespace glimps

#endif  // GLIMPS_ERRORS_H_
