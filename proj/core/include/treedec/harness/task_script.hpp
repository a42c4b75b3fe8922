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
#include <optional>
#include <string>
#include <vector>

#include "treedec/types.hpp"

namespace treedec {

// How the text after a block is produced from what the model can see of
// that block.
struct ConclusionRule {
  enum class Kind {
    kFixed,           // `text` verbatim
    kTitleOfMarked,   // text + title of the first step whose body contains `marker`
    kBodyExcerpt,     // text + body of that step from after `marker` up to `stop`
  };
  Kind kind = Kind::kFixed;
  std::string text;
  std::string marker;
  char stop = '.';
  std::string not_found = "unknown";
};

struct ScriptBlock {
  std::vector<std::string> titles;
  std::vector<std::string> bodies;  // bodies[i] belongs to titles[i]
};

struct TaskShape {
  std::size_t n_branches = 0;
  std::size_t body_min = 0;
  std::size_t body_max = 0;
  std::size_t prefix_len = 0;  // prompt tokens
};

// A synthetic task plus the deterministic answer a scripted engine gives for
// it. The canonical answer is
//   texts[0] block[0] texts[1] ... block[m-1] texts[m] EOS
// where each block renders as (MARK title COLON body)* MARK TERM and
// texts[k] for k >= 1 follows rules[k-1].
struct TaskScript {
  std::string suite;
  std::uint64_t seed = 0;
  std::string task_text;
  std::vector<std::string> texts;
  std::vector<ScriptBlock> blocks;
  std::vector<ConclusionRule> rules;  // one per block
  std::optional<std::string> expected_answer;
  std::string answer_prefix;  // e.g. "Name: ", used to extract the answer
  std::vector<std::string> required_phrases;  // structural check when no exact answer
  TaskShape shape;

  // Throws Error(kInvalidTaskParameter) if titles are empty/duplicated or any
  // title/body contains control strings.
  void validate() const;

  // The answer a prefix-local script produces, as tokens (EOS included).
  TokenSeq canonical_answer() const;
};

// Text after the last occurrence of `prefix` up to end of line, or nullopt.
std::optional<std::string> extract_answer(const std::string& final_text, const std::string& prefix);

// Exact-match when the task defines an answer, otherwise every required
// phrase must appear in the final text.
bool answer_correct(const TaskScript& task, const std::string& final_text);

}  // namespace treedec
