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

#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "treedec/types.hpp"

namespace treedec {

// Skeleton-format automaton driven by emitted tokens:
//
//   Free --MARK--> BlockOpen --byte--> InTitle --COLON--> AfterColonInTitle
//   AfterColonInTitle --ELLIPSIS--> AfterEllipsis --MARK--> TitleOpen
//   TitleOpen --byte--> InTitle,  TitleOpen / AfterEllipsis --TERM--> Free
//
// Free passes logits through. AfterColonInTitle admits only ELLIPSIS and
// AfterEllipsis only MARK or TERM. The title phases keep an opened step
// well formed: a title is non-empty bytes closed by COLON, a block holds at
// least one step, and TERM may only follow the MARK that closes the block.
enum class ForcingPhase : std::uint8_t {
  kFree,
  kBlockOpen,  // after the MARK that opens a block: a title must follow
  kTitleOpen,
  kInTitle,
  kAfterColonInTitle,
  kAfterEllipsis,
};

std::string_view phase_name(ForcingPhase phase);

struct ForcingState {
  ForcingPhase phase = ForcingPhase::kFree;

  bool allows(TokenId token) const;
  // Sets every disallowed entry to -infinity.
  void mask(std::span<float> logits) const;
  ForcingState advance(TokenId emitted) const;

  bool operator==(const ForcingState&) const = default;
};

struct ForcedChoice {
  std::vector<float> logits;  // masked
  TokenId token = 0;          // greedy choice over the masked logits
  ForcingState next;          // state after emitting `token`
};

ForcedChoice apply_forcing(ForcingState state, std::span<const float> logits);

}  // namespace treedec
