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

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "treedec/types.hpp"

namespace treedec {

enum class Stage : std::size_t { kSkeleton = 0, kParallel = 1, kContinuation = 2, kNormal = 3 };
inline constexpr std::size_t kStageCount = 4;

std::string_view stage_name(Stage stage);

struct StageStats {
  std::size_t forward_passes = 0;  // every engine invocation, prefill included
  std::size_t prefill_passes = 0;  // passes that encode known tokens (prompt, headers, flattened block)
  std::size_t tokens_emitted = 0;  // greedy selections kept (pads excluded)
  double wall_ms = 0.0;
};

// Positions of the rows submitted in one stage-2 pass.
struct ParallelPassRecord {
  std::size_t block = 0;
  bool title_prefill = false;
  std::vector<PositionId> positions;
};

struct BlockRecord {
  std::size_t block_start = 0;  // absolute cache index
  std::size_t n_branches = 0;
  std::size_t max_header_len = 0;
  std::vector<std::size_t> body_lengths;
  std::vector<bool> capped;
  std::size_t stage2_passes = 0;  // title prefill + body passes
};

struct DecodeTrace {
  std::string mode;  // "parallel" or "normal"
  std::array<StageStats, kStageCount> stages{};
  std::size_t blocks = 0;
  bool fallback = false;  // stage 1 found no marker; answer decoded plainly
  std::vector<BlockRecord> block_records;
  std::vector<ParallelPassRecord> parallel_passes;
  std::size_t answer_tokens = 0;  // length of the generated answer, EOS included
  std::string final_text;

  StageStats& at(Stage s) { return stages[static_cast<std::size_t>(s)]; }
  const StageStats& at(Stage s) const { return stages[static_cast<std::size_t>(s)]; }

  std::size_t total_forward_passes() const;
  std::size_t total_prefill_passes() const;
  double total_wall_ms() const;

  // Stage timings, pass and token counts, block count. Wall times are
  // omitted when include_timing is false so traces compare byte-for-byte.
  std::string to_json(bool include_timing = true) const;
};

}  // namespace treedec
