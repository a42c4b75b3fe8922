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

#include <string>
#include <vector>

#include "treedec/pipeline/pipeline.hpp"

namespace treedec::oracle {

// Body passes of one block must share a single position id per pass and
// advance by exactly one between consecutive passes. Returns the number of
// offending passes.
std::size_t position_law_violations(const DecodeTrace& trace);

// Snapshots the shared prefix when stage 1 completes and checks at every
// later checkpoint of the block that its K/V entries are bitwise unchanged.
class PrefixStabilityObserver : public PipelineObserver {
 public:
  void on_checkpoint(Checkpoint point, std::size_t block, const KVCache& cache,
                     std::size_t block_start) override;

  std::size_t checks() const { return checks_; }
  std::size_t violations() const { return violations_; }

 private:
  KVCache snapshot_;
  std::size_t prefix_len_ = 0;
  std::size_t checks_ = 0;
  std::size_t violations_ = 0;
};

// Checks every forced stage-1 step: a title COLON must be followed by
// ELLIPSIS, and that ELLIPSIS by MARK or TERM; the emitted token must be
// allowed by the state. Free-text COLON and ELLIPSIS are unconstrained.
class ForcingObserver : public PipelineObserver {
 public:
  void on_forced_token(ForcingState before, std::span<const float> masked, TokenId emitted) override;

  std::size_t steps() const { return steps_; }
  std::size_t violations() const { return violations_.size(); }
  const std::vector<std::string>& messages() const { return violations_; }

 private:
  TokenId previous_ = -1;
  ForcingPhase previous_phase_ = ForcingPhase::kFree;
  std::size_t steps_ = 0;
  std::vector<std::string> violations_;
};

// Forwards every hook to each observer in order.
class ObserverFanout : public PipelineObserver {
 public:
  explicit ObserverFanout(std::vector<PipelineObserver*> observers) : observers_(std::move(observers)) {}

  void on_forced_token(ForcingState before, std::span<const float> masked, TokenId emitted) override;
  void on_checkpoint(Checkpoint point, std::size_t block, const KVCache& cache,
                     std::size_t block_start) override;
  void on_branch_token(std::size_t block, std::size_t branch, std::size_t step,
                       std::span<const float> logits, TokenId token) override;

 private:
  std::vector<PipelineObserver*> observers_;
};

}  // namespace treedec::oracle
