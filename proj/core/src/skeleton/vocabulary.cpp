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

#include "treedec/skeleton/vocabulary.hpp"

#include <array>
#include <utility>

namespace treedec::vocab {
namespace {

// Ordered longest-first so "......" is never split into shorter matches.
constexpr std::array<std::pair<std::string_view, TokenId>, 4> kSpecials{{
    {kEllipsisText, kEllipsis},
    {kMarkText, kMark},
    {kTermText, kTerm},
    {kColonText, kColon},
}};

std::string_view surface(TokenId t) {
  switch (t) {
    case kMark: return kMarkText;
    case kTerm: return kTermText;
    case kEllipsis: return kEllipsisText;
    case kColon: return kColonText;
    default: return {};
  }
}

}  // namespace

TokenSeq encode(std::string_view text) {
  TokenSeq out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    bool matched = false;
    for (const auto& [str, id] : kSpecials) {
      if (text.substr(i, str.size()) == str) {
        out.push_back(id);
        i += str.size();
        matched = true;
        break;
      }
    }
    if (!matched) {
      out.push_back(static_cast<TokenId>(static_cast<unsigned char>(text[i])));
      ++i;
    }
  }
  return out;
}

std::string decode(std::span<const TokenId> tokens) {
  std::string out;
  out.reserve(tokens.size());
  for (TokenId t : tokens) {
    if (is_byte(t)) {
      out.push_back(static_cast<char>(static_cast<unsigned char>(t)));
    } else {
      out.append(surface(t));
    }
  }
  return out;
}

std::string describe(std::span<const TokenId> tokens) {
  std::string out;
  for (TokenId t : tokens) {
    if (t == kPad) {
      out += "<pad>";
    } else if (t == kEos) {
      out += "<eos>";
    } else if (is_valid(t)) {
      const TokenId one[] = {t};
      out += decode(one);
    } else {
      out += "<" + std::to_string(t) + ">";
    }
  }
  return out;
}

}  // namespace treedec::vocab
