// Copyright 2026 The ewtforecast Authors
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

#include <stdexcept>
#include <string>
#include <string_view>

namespace ewtf {

/// Failure categories raised across the library. Each maps onto one of the
/// documented error conditions of an operation.
enum class ErrorCode {
  invalid_argument,
  degenerate_series,
  zero_observed,
  length_mismatch,
  non_positive_baseline,
  invalid_split,
  too_short,
  no_peaks,
  inadmissible_gamma,
  empty_graph,
  too_large,
  missing_distance,
  too_small,
  empty_pool,
  shape_mismatch,
  too_few_samples,
  diverged_loss,
  out_of_bounds,
  singular_kernel,
  parse_error,
  alignment_error,
  io_error,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::degenerate_series: return "DegenerateSeries";
    case ErrorCode::zero_observed: return "ZeroObserved";
    case ErrorCode::length_mismatch: return "LengthMismatch";
    case ErrorCode::non_positive_baseline: return "NonPositiveBaseline";
    case ErrorCode::invalid_split: return "InvalidSplit";
    case ErrorCode::too_short: return "TooShort";
    case ErrorCode::no_peaks: return "NoPeaks";
    case ErrorCode::inadmissible_gamma: return "InadmissibleGamma";
    case ErrorCode::empty_graph: return "EmptyGraph";
    case ErrorCode::too_large: return "TooLarge";
    case ErrorCode::missing_distance: return "MissingDistance";
    case ErrorCode::too_small: return "TooSmall";
    case ErrorCode::empty_pool: return "EmptyPool";
    case ErrorCode::shape_mismatch: return "ShapeMismatch";
    case ErrorCode::too_few_samples: return "TooFewSamples";
    case ErrorCode::diverged_loss: return "DivergedLoss";
    case ErrorCode::out_of_bounds: return "OutOfBounds";
    case ErrorCode::singular_kernel: return "SingularKernel";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::alignment_error: return "AlignmentError";
    case ErrorCode::io_error: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  /// Message without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace ewtf
