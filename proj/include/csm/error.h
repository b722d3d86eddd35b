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

#ifndef CSM_ERROR_H_
#define CSM_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace csm {

// Failure classes raised across the toolkit. Each maps onto one process exit
// code in the CLI (see ExitCodeFor).
enum class ErrorCode {
  kUsage,
  kUnreadableFile,
  kSampleRateMismatch,
  kChannelMismatch,
  kAlignmentFailure,
  kTooShort,
  kEmptySegment,
  kDegenerateInput,
  kInsufficientData,
  kZeroVariance,
  kDegenerateGrid,
  kAllUndefined,
  kMissingBf,
  kLengthMismatch,
  kNonFiniteLoss,
  kSchemaError,
  kMissingFile,
  kDuplicateCondition,
  kInvalidSpec,
  kInvalidParameters,
};

std::string_view ErrorName(ErrorCode code);

// 2 usage error, 3 data error, 4 numeric failure.
int ExitCodeFor(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace csm

#endif  // CSM_ERROR_H_
