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

#include "treedec/skeleton/skeleton.hpp"

#include <nlohmann/json.hpp>

#include "treedec/error.hpp"
#include "treedec/skeleton/vocabulary.hpp"

namespace treedec {

std::string Skeleton::to_json() const {
  nlohmann::json j;
  j["preamble"] = vocab::decode(preamble);
  j["titles"] = nlohmann::json::array();
  for (const auto& t : titles) j["titles"].push_back(vocab::decode(t));
  j["block_start"] = block_start;
  j["terminated"] = terminated;
  return j.dump(2, ' ', false, nlohmann::json::error_handler_t::replace);
}

Skeleton parse_skeleton(std::span<const TokenId> tokens) {
  Skeleton sk;
  const std::size_t n = tokens.size();
  std::size_t i = 0;
  while (i < n && tokens[i] != vocab::kMark && tokens[i] != vocab::kTerm) ++i;
  if (i == n || tokens[i] == vocab::kTerm) {
    throw Error(ErrorCode::kNoMarkFound, "transcript has no step marker");
  }
  sk.preamble.assign(tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(i));
  sk.block_start = i;

  while (i < n) {
    // tokens[i] is MARK
    const std::size_t mark_at = i++;
    if (i == n) break;
    if (tokens[i] == vocab::kTerm) {
      sk.terminated = true;
      break;
    }
    TokenSeq title;
    while (i < n && tokens[i] != vocab::kColon) {
      const TokenId t = tokens[i];
      if (t == vocab::kMark || t == vocab::kTerm || t == vocab::kEllipsis || t == vocab::kPad ||
          t == vocab::kEos) {
        throw Error(ErrorCode::kMalformedBranch,
                    "step opened at " + std::to_string(mark_at) + " has no title/colon");
      }
      title.push_back(t);
      ++i;
    }
    if (i == n) break;  // incomplete trailing step
    if (title.empty()) {
      throw Error(ErrorCode::kMalformedBranch, "empty title at " + std::to_string(mark_at));
    }
    sk.titles.push_back(std::move(title));
    ++i;  // COLON
    while (i < n && tokens[i] != vocab::kMark && tokens[i] != vocab::kTerm) ++i;
    if (i < n && tokens[i] == vocab::kTerm) {
      sk.terminated = true;
      break;
    }
  }
  if (sk.titles.empty()) {
    throw Error(ErrorCode::kMalformedBranch, "block contains no complete step");
  }
  return sk;
}

TokenSeq branch_header(const TokenSeq& title) {
  TokenSeq out;
  out.reserve(title.size() + 2);
  out.push_back(vocab::kMark);
  out.insert(out.end(), title.begin(), title.end());
  out.push_back(vocab::kColon);
  return out;
}

}  // namespace treedec
