// Copyright 2026 The cohdist Authors
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

namespace cohdist {

enum class ErrorCode {
  NonHermitian,
  NotPSD,
  NotDensityMatrix,
  DimMismatch,
  CapExceeded,
  NotDistribution,
  BadM,
  BadEpsilon,
  IllPosed,
  DimTooLarge,
  NumericalFailure,
  ConvergenceFailure,
  NotAPurification,
  IncompatibleEnsemble,
  ParseError,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; the code says what went wrong.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonHermitian: return "NonHermitian";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::NotDensityMatrix: return "NotDensityMatrix";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::NotDistribution: return "NotDistribution";
    case ErrorCode::BadM: return "BadM";
    case ErrorCode::BadEpsilon: return "BadEpsilon";
    case ErrorCode::IllPosed: return "IllPosed";
    case ErrorCode::DimTooLarge: return "DimTooLarge";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::NotAPurification: return "NotAPurification";
    case ErrorCode::IncompatibleEnsemble: return "IncompatibleEnsemble";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace cohdist
