// Copyright 2026 The VitalNet Authors.
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

#ifndef VITALNET_ERROR_HPP_
#define VITALNET_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace vitalnet {

// Error categories surfaced through the C API as distinct status codes.
enum class ErrorKind {
  kDimension,
  kContract,
  kParse,
  kConfig,
  kUndefinedMetric,
  kIo,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& m) : Error(ErrorKind::kDimension, m) {}
};

class ContractError : public Error {
 public:
  explicit ContractError(const std::string& m) : Error(ErrorKind::kContract, m) {}
};

// Malformed input row. `row` is 1-based and counts the header line.
class ParseError : public Error {
 public:
  ParseError(std::size_t row, const std::string& m)
      : Error(ErrorKind::kParse, "row " + std::to_string(row) + ": " + m), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& m) : Error(ErrorKind::kConfig, m) {}
};

class UndefinedMetricError : public Error {
 public:
  explicit UndefinedMetricError(const std::string& m)
      : Error(ErrorKind::kUndefinedMetric, m) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error(ErrorKind::kIo, m) {}
};

// Throws ContractError with `message` unless `condition` holds.
inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractError(message);
}

}  // namespace vitalnet

#endif  // VITALNET_ERROR_HPP_
