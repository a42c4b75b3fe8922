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

#include "treedec/oracle/invariants.hpp"

#include <cmath>
#include <cstring>

#include "treedec/skeleton/vocabulary.hpp"

namespace treedec::oracle {

std::size_t position_law_violations(const DecodeTrace& trace) {
  std::size_t bad = 0;
  bool have_prev = false;
  std::size_t prev_block = 0;
  PositionId prev = 0;
  for (const auto& pass : trace.parallel_passes) {
    if (pass.title_prefill) {
      have_prev = false;
      continue;
    }
    bool shared = !pass.positions.empty();
    for (PositionId p : pass.positions) shared = shared && p == pass.positions.front();
    bool ok = shared;
    if (ok && have_prev && prev_block == pass.block) ok = pass.positions.front() == prev + 1;
    if (!ok) ++bad;
    if (!pass.positions.empty()) {
      have_prev = true;
      prev_block = pass.block;
      prev = pass.positions.front();
    }
  }
  return bad;
}

void PrefixStabilityObserver::on_checkpoint(Checkpoint point, std::size_t, const KVCache& cache,
                                            std::size_t block_start) {
  if (point == Checkpoint::kSkeletonDone) {
    snapshot_ = cache;
    prefix_len_ = block_start;
    return;
  }
  ++checks_;
  if (block_start != prefix_len_ || cache.size() < prefix_len_ ||
      !cache.prefix_equals(snapshot_, prefix_len_)) {
    ++violations_;
  }
}

void ForcingObserver::on_forced_token(ForcingState before, std::span<const float> masked,
                                      TokenId emitted) {
  ++steps_;
  auto fail = [&](const std::string& what) {
    violations_.push_back("step " + std::to_string(steps_) + ": " + what);
  };
  if (!before.allows(emitted)) fail("emitted token not allowed in phase " + std::string(phase_name(before.phase)));
  if (emitted < 0 || static_cast<std::size_t>(emitted) >= masked.size() ||
      !std::isfinite(masked[static_cast<std::size_t>(emitted)])) {
    fail("emitted a masked-out token");
  }
  if (previous_ == vocab::kColon && previous_phase_ == ForcingPhase::kInTitle && emitted != vocab::kEllipsis) {
    fail("title COLON not followed by ELLIPSIS");
  }
  if (previous_ == vocab::kEllipsis && previous_phase_ == ForcingPhase::kAfterColonInTitle &&
      emitted != vocab::kMark && emitted != vocab::kTerm) {
    fail("ELLIPSIS not followed by MARK or TERM");
  }
  previous_ = emitted;
  previous_phase_ = before.phase;
}

void ObserverFanout::on_forced_token(ForcingState before, std::span<const float> masked,
                                     TokenId emitted) {
  for (auto* o : observers_) o->on_forced_token(before, masked, emitted);
}

void ObserverFanout::on_checkpoint(Checkpoint point, std::size_t block, const KVCache& cache,
                                   std::size_t block_start) {
  for (auto* o : observers_) o->on_checkpoint(point, block, cache, block_start);
}

void ObserverFanout::on_branch_token(std::size_t block, std::size_t branch, std::size_t step,
                                     std::span<const float> logits, TokenId token) {
  for (auto* o : observers_) o->on_branch_token(block, branch, step, logits, token);
}

}  // namespace treedec::oracle
