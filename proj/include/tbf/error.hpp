// Copyright 2026 The TBF Authors
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

#include <stdexcept>
#include <string>
#include <string_view>

namespace tbf {

enum class ErrorCode {
  // belief arithmetic
  InvalidFrame,
  NotNormalized,
  NegativeMass,
  NonFiniteInput,
  BadSubset,
  FrameMismatch,
  AlphaOutOfRange,
  TotalConflict,
  // fuzzy conversion
  InvalidPartition,
  PartitionOverlap,
  // rule fusion
  InvalidRule,
  MissingParameter,
  // temporal filter
  InvalidFilterConfig,
  InconsistentPrior,
  NonNormalizedMeasurement,
  EmptyInput,
  // evaluation
  InvalidAnnotation,
  // pipeline
  ConfigError,
  ParseError,
  RaggedRows,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidFrame: return "InvalidFrame";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::NegativeMass: return "NegativeMass";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::BadSubset: return "BadSubset";
    case ErrorCode::FrameMismatch: return "FrameMismatch";
    case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::TotalConflict: return "TotalConflict";
    case ErrorCode::InvalidPartition: return "InvalidPartition";
    case ErrorCode::PartitionOverlap: return "PartitionOverlap";
    case ErrorCode::InvalidRule: return "InvalidRule";
    case ErrorCode::MissingParameter: return "MissingParameter";
    case ErrorCode::InvalidFilterConfig: return "InvalidFilterConfig";
    case ErrorCode::InconsistentPrior: return "InconsistentPrior";
    case ErrorCode::NonNormalizedMeasurement: return "NonNormalizedMeasurement";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InvalidAnnotation: return "InvalidAnnotation";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::RaggedRows: return "RaggedRows";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Single exception type for the library; `code()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

  /// True for failures caused by bad input data or the filesystem rather than
  /// by configuration.
  [[nodiscard]] bool is_io() const noexcept {
    return code_ == ErrorCode::ParseError || code_ == ErrorCode::RaggedRows ||
           code_ == ErrorCode::IoError;
  }

 private:
  ErrorCode code_;
};

}  // namespace tbf
