// Copyright 2026 The bpm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bpm {

/// Raised when a caller breaks an operation's precondition.
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

/// Raised when a bounded language exceeds the configured word cap.
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad flags, missing columns, infeasible generator targets.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input that parsed but holds no traces.
struct EmptyLogError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input. line/column are 1-based; 0 when unknown.
struct ParseError : std::runtime_error {
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : std::runtime_error(what + " (line " + std::to_string(line) +
                           ", column " + std::to_string(column) + ")"),
        line(line),
        column(column) {}
  std::size_t line;
  std::size_t column;
};

/// A CSV row that could not be interpreted; row is 1-based, header is row 1.
struct RowError : std::runtime_error {
  RowError(const std::string& what, std::size_t row)
      : std::runtime_error(what + " (row " + std::to_string(row) + ")"),
        row(row) {}
  std::size_t row;
};

}  // namespace bpm
