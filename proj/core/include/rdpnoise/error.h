// Copyright 2026 The RDP Noise Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RDPNOISE_ERROR_H_
#define RDPNOISE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace rdpnoise {

enum class ErrorCode {
  kNormalizationViolation,
  kRangeViolation,
  kDomainViolation,
  kDivergentTail,
  kParseError,
  kStrictFeasibilityViolation,
  kInvalidOrder,
  kBisectionFailure,
  kSingularProjection,
  kSearchFailure,
  kGridOverflow,
  kUnattainable,
  kQuadratureFailure,
  kCalibrationFailure,
  kIngestError,
  kInvalidArgument,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// callers (and the CLI's exit-code mapping) can branch on the kind of failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rdpnoise

#endif  // RDPNOISE_ERROR_H_
