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

#include "treedec/skeleton/forcing.hpp"

#include <limits>

#include "treedec/model/forward_engine.hpp"
#include "treedec/skeleton/vocabulary.hpp"

namespace treedec {

std::string_view phase_name(ForcingPhase phase) {
  switch (phase) {
    case ForcingPhase::kFree: return "free";
    case ForcingPhase::kBlockOpen: return "block-open";
    case ForcingPhase::kTitleOpen: return "title-open";
    case ForcingPhase::kInTitle: return "in-title";
    case ForcingPhase::kAfterColonInTitle: return "after-colon";
    case ForcingPhase::kAfterEllipsis: return "after-ellipsis";
  }
  return "?";
}

bool ForcingState::allows(TokenId t) const {
  switch (phase) {
    case ForcingPhase::kFree: return true;
    case ForcingPhase::kBlockOpen: return vocab::is_byte(t);
    case ForcingPhase::kTitleOpen: return vocab::is_byte(t) || t == vocab::kTerm;
    case ForcingPhase::kInTitle: return vocab::is_byte(t) || t == vocab::kColon;
    case ForcingPhase::kAfterColonInTitle: return t == vocab::kEllipsis;
    case ForcingPhase::kAfterEllipsis: return t == vocab::kMark || t == vocab::kTerm;
  }
  return false;
}

void ForcingState::mask(std::span<float> logits) const {
  if (phase == ForcingPhase::kFree) return;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (!allows(static_cast<TokenId>(i))) logits[i] = -std::numeric_limits<float>::infinity();
  }
}

ForcingState ForcingState::advance(TokenId t) const {
  switch (phase) {
    case ForcingPhase::kFree:
      return {t == vocab::kMark ? ForcingPhase::kBlockOpen : ForcingPhase::kFree};
    case ForcingPhase::kBlockOpen:
      return {vocab::is_byte(t) ? ForcingPhase::kInTitle : ForcingPhase::kFree};
    case ForcingPhase::kTitleOpen:
      if (t == vocab::kTerm) return {ForcingPhase::kFree};
      return {vocab::is_byte(t) ? ForcingPhase::kInTitle : ForcingPhase::kFree};
    case ForcingPhase::kInTitle:
      if (t == vocab::kColon) return {ForcingPhase::kAfterColonInTitle};
      return {vocab::is_byte(t) ? ForcingPhase::kInTitle : ForcingPhase::kFree};
    case ForcingPhase::kAfterColonInTitle:
      return {t == vocab::kEllipsis ? ForcingPhase::kAfterEllipsis : ForcingPhase::kFree};
    case ForcingPhase::kAfterEllipsis:
      return {t == vocab::kMark ? ForcingPhase::kTitleOpen : ForcingPhase::kFree};
  }
  return {};
}

ForcedChoice apply_forcing(ForcingState state, std::span<const float> logits) {
  ForcedChoice out;
  out.logits.assign(logits.begin(), logits.end());
  state.mask(out.logits);
  out.token = argmax(out.logits);
  out.next = state.advance(out.token);
  return out;
}

}  // namespace treedec
