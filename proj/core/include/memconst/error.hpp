// Copyright 2026 The memconst Authors. All Rights Reserved.
//
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

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace memconst {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates a domain invariant. `field()` names the offending field.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Stride-2 layer applied to an odd spatial size.
class ResolutionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Consecutive layers of a skeleton do not agree on channels or spatial size.
class ChainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// No admissible value satisfies a memory target or constraint.
class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& message,
                           std::optional<int> stage = std::nullopt,
                           std::optional<std::uint64_t> tightest_peak = std::nullopt)
      : Error(message), stage_(stage), tightest_peak_(tightest_peak) {}

  /// 1-based stage index of a failed planner transition, if any.
  std::optional<int> stage() const noexcept { return stage_; }
  /// Smallest peak observed while searching for a feasible point, if any.
  std::optional<std::uint64_t> tightest_peak() const noexcept { return tightest_peak_; }

 private:
  std::optional<int> stage_;
  std::optional<std::uint64_t> tightest_peak_;
};

/// Balanced sampling could not fill every bucket within its draw budget.
class PartialDatasetError : public Error {
 public:
  PartialDatasetError(const std::string& message, std::vector<std::size_t> occupancy)
      : Error(message), occupancy_(std::move(occupancy)) {}

  const std::vector<std::size_t>& occupancy() const noexcept { return occupancy_; }

 private:
  std::vector<std::size_t> occupancy_;
};

/// Normal equations have no unique solution.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace memconst
