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
#include <vector>

#include "treedec/types.hpp"

namespace treedec {

// Parsed stage-1 transcript. Titles exclude the MARK before and the COLON
// after them; block_start is the transcript index of the first MARK.
struct Skeleton {
  TokenSeq preamble;
  std::vector<TokenSeq> titles;
  std::size_t block_start = 0;
  bool terminated = false;

  std::size_t n_branches() const { return titles.size(); }

  // {"preamble": str, "titles": [str], "block_start": int, "terminated": bool}
  std::string to_json() const;
};

// Reads up to the first TERM. After a title's COLON everything up to the next
// MARK/TERM is skipped, so both skeletons and fully written answers parse;
// a TERM directly after an ellipsis is accepted as if preceded by MARK.
//
// Throws Error(kNoMarkFound) when no MARK precedes TERM/end, and
// Error(kMalformedBranch) when a MARK is not followed by a non-empty title and
// COLON before the next control token. An incomplete trailing step in an
// unterminated transcript is dropped.
Skeleton parse_skeleton(std::span<const TokenId> tokens);

// Branch header tokens used in stage 2: MARK title COLON.
TokenSeq branch_header(const TokenSeq& title);

}  // namespace treedec
