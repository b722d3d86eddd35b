// Copyright 2026 The CSM Authors. All Rights Reserved.
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

#include "csm/error.h"

namespace csm {

std::string_view ErrorName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage: return "Usage";
    case ErrorCode::kUnreadableFile: return "UnreadableFile";
    case ErrorCode::kSampleRateMismatch: return "SampleRateMismatch";
    case ErrorCode::kChannelMismatch: return "ChannelMismatch";
    case ErrorCode::kAlignmentFailure: return "AlignmentFailure";
    case ErrorCode::kTooShort: return "TooShort";
    case ErrorCode::kEmptySegment: return "EmptySegment";
    case ErrorCode::kDegenerateInput: return "DegenerateInput";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kDegenerateGrid: return "DegenerateGrid";
    case ErrorCode::kAllUndefined: return "AllUndefined";
    case ErrorCode::kMissingBf: return "MissingBf";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kMissingFile: return "MissingFile";
    case ErrorCode::kDuplicateCondition: return "DuplicateCondition";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kInvalidParameters: return "InvalidParameters";
  }
  return "Unknown";
}

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage:
      return 2;
    case ErrorCode::kZeroVariance:
    case ErrorCode::kDegenerateGrid:
    case ErrorCode::kAllUndefined:
    case ErrorCode::kNonFiniteLoss:
    case ErrorCode::kDegenerateInput:
      return 4;
    default:
      return 3;
  }
}

}  // namespace csm
