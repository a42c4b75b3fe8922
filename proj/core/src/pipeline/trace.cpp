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

#include "treedec/pipeline/trace.hpp"

#include <nlohmann/json.hpp>

#include "treedec/error.hpp"
#include "treedec/pipeline/decode_config.hpp"

namespace treedec {

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::kSkeleton: return "skeleton";
    case Stage::kParallel: return "parallel";
    case Stage::kContinuation: return "continuation";
    case Stage::kNormal: return "normal";
  }
  return "?";
}

void DecodeConfig::validate() const {
  if (max_skeleton_tokens < 1 || max_steps_per_branch < 1 || max_continuation_tokens < 1 ||
      max_normal_tokens < 1 || max_blocks < 1) {
    throw Error(ErrorCode::kInvalidConfig, "decode caps must be >= 1");
  }
}

std::size_t DecodeTrace::total_forward_passes() const {
  std::size_t n = 0;
  for (const auto& s : stages) n += s.forward_passes;
  return n;
}

std::size_t DecodeTrace::total_prefill_passes() const {
  std::size_t n = 0;
  for (const auto& s : stages) n += s.prefill_passes;
  return n;
}

double DecodeTrace::total_wall_ms() const {
  double t = 0.0;
  for (const auto& s : stages) t += s.wall_ms;
  return t;
}

std::string DecodeTrace::to_json(bool include_timing) const {
  nlohmann::ordered_json j;
  j["mode"] = mode;
  j["blocks"] = blocks;
  j["fallback"] = fallback;
  auto& js = j["stages"];
  for (std::size_t i = 0; i < kStageCount; ++i) {
    const auto& s = stages[i];
    if (s.forward_passes == 0) continue;
    nlohmann::ordered_json e;
    e["forward_passes"] = s.forward_passes;
    e["prefill_passes"] = s.prefill_passes;
    e["decode_passes"] = s.forward_passes - s.prefill_passes;
    e["tokens_emitted"] = s.tokens_emitted;
    if (include_timing) e["wall_ms"] = s.wall_ms;
    js[std::string(stage_name(static_cast<Stage>(i)))] = e;
  }
  j["totals"] = {{"forward_passes", total_forward_passes()},
                 {"prefill_passes", total_prefill_passes()},
                 {"answer_tokens", answer_tokens}};
  if (include_timing) j["totals"]["wall_ms"] = total_wall_ms();
  j["parallel_blocks"] = nlohmann::ordered_json::array();
  for (const auto& b : block_records) {
    nlohmann::ordered_json e;
    e["block_start"] = b.block_start;
    e["n_branches"] = b.n_branches;
    e["max_header_len"] = b.max_header_len;
    e["body_lengths"] = b.body_lengths;
    e["capped"] = b.capped;
    e["passes"] = b.stage2_passes;
    j["parallel_blocks"].push_back(e);
  }
  return j.dump(2, ' ', false, nlohmann::json::error_handler_t::replace);
}

}  // namespace treedec
