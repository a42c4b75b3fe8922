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

#include <span>
#include <string>
#include <string_view>

#include "treedec/types.hpp"

namespace treedec::vocab {

// Byte tokens occupy ids 0..255; special tokens follow.
inline constexpr TokenId kByteCount = 256;
inline constexpr TokenId kMark = 256;      // "####"
inline constexpr TokenId kTerm = 257;      // "%%%%"
inline constexpr TokenId kEllipsis = 258;  // "......"
inline constexpr TokenId kColon = 259;     // ":"
inline constexpr TokenId kPad = 260;       // no surface form
inline constexpr TokenId kEos = 261;       // no surface form
inline constexpr TokenId kSize = 262;

inline constexpr std::string_view kMarkText = "####";
inline constexpr std::string_view kTermText = "%%%%";
inline constexpr std::string_view kEllipsisText = "......";
inline constexpr std::string_view kColonText = ":";

constexpr bool is_byte(TokenId t) { return t >= 0 && t < kByteCount; }
constexpr bool is_special(TokenId t) { return t >= kByteCount && t < kSize; }
constexpr bool is_valid(TokenId t) { return t >= 0 && t < kSize; }

// Greedy left-to-right: special strings win over byte fallback, longest first.
TokenSeq encode(std::string_view text);

// PAD and EOS decode to nothing, so decode(encode(s)) == s for every byte string.
std::string decode(std::span<const TokenId> tokens);

// Human-readable rendering with PAD/EOS shown as <pad>/<eos>.
std::string describe(std::span<const TokenId> tokens);

}  // namespace treedec::vocab
