// Copyright 2026 The treedec Authors
// SPDX-License-Identifier: Apache-2.0
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

#include "treedec/error.hpp"

namespace treedec {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConfig: return "invalid-config";
    case ErrorCode::kConfiguration: return "configuration-error";
    case ErrorCode::kLengthMismatch: return "length-mismatch";
    case ErrorCode::kMaskOutOfRange: return "mask-out-of-range";
    case ErrorCode::kInvalidToken: return "invalid-token";
    case ErrorCode::kNonFiniteLogits: return "non-finite-logits";
    case ErrorCode::kScriptUndefinedContinuation: return "script-undefined-continuation";
    case ErrorCode::kLengthExceedsCache: return "length-exceeds-cache";
    case ErrorCode::kEmptyBranchSet: return "empty-branch-set";
    case ErrorCode::kNoMarkFound: return "no-mark-found";
    case ErrorCode::kMalformedBranch: return "malformed-branch";
    case ErrorCode::kSkeletonCapExceeded: return "skeleton-cap-exceeded";
    case ErrorCode::kContinuationCapExceeded: return "continuation-cap-exceeded";
    case ErrorCode::kInvalidTaskParameter: return "invalid-task-parameter";
    case ErrorCode::kIo: return "io-error";
  }
  return "unknown-error";
}

}  // namespace treedec
