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

#include "rdpnoise/error.h"

namespace rdpnoise {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNormalizationViolation: return "NormalizationViolation";
    case ErrorCode::kRangeViolation: return "RangeViolation";
    case ErrorCode::kDomainViolation: return "DomainViolation";
    case ErrorCode::kDivergentTail: return "DivergentTail";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kStrictFeasibilityViolation:
      return "StrictFeasibilityViolation";
    case ErrorCode::kInvalidOrder: return "InvalidOrder";
    case ErrorCode::kBisectionFailure: return "BisectionFailure";
    case ErrorCode::kSingularProjection: return "SingularProjection";
    case ErrorCode::kSearchFailure: return "SearchFailure";
    case ErrorCode::kGridOverflow: return "GridOverflow";
    case ErrorCode::kUnattainable: return "Unattainable";
    case ErrorCode::kQuadratureFailure: return "QuadratureFailure";
    case ErrorCode::kCalibrationFailure: return "CalibrationFailure";
    case ErrorCode::kIngestError: return "IngestError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace rdpnoise
