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
#include <vector>

#include "treedec/layout/sequence_layout.hpp"
#include "treedec/model/forward_engine.hpp"
#include "treedec/pipeline/decode_config.hpp"
#include "treedec/pipeline/trace.hpp"
#include "treedec/skeleton/forcing.hpp"
#include "treedec/skeleton/skeleton.hpp"

namespace treedec {

enum class Checkpoint {
  kSkeletonDone,     // stage 1 parsed, before truncation; block_start is exact
  kTitlesEncoded,    // stage-2 title prefill appended
  kParallelStep,     // one stage-2 body pass appended
  kFlattenEncoded,   // stage-3 truncation + flattened prefill done
  kContinuationDone,
};

// Hooks for verification and instrumentation. All methods are optional.
class PipelineObserver {
 public:
  virtual ~PipelineObserver() = default;
  virtual void on_forced_token(ForcingState /*before*/, std::span<const float> /*masked*/,
                               TokenId /*emitted*/) {}
  virtual void on_checkpoint(Checkpoint /*point*/, std::size_t /*block*/, const KVCache& /*cache*/,
                             std::size_t /*block_start*/) {}
  // Token chosen for `branch` at body step `step` (the terminator included).
  virtual void on_branch_token(std::size_t /*block*/, std::size_t /*branch*/, std::size_t /*step*/,
                               std::span<const float> /*logits*/, TokenId /*token*/) {}
};

// One run's exclusive state: engine reference, cache, trace and answer.
// Causal helpers place every token at position == cache index.
class DecodeSession {
 public:
  DecodeSession(const ForwardEngine& engine, DecodeConfig config,
                PipelineObserver* observer = nullptr);

  const ForwardEngine& engine() const { return *engine_; }
  const DecodeConfig& config() const { return config_; }
  KVCache& cache() { return cache_; }
  const KVCache& cache() const { return cache_; }
  DecodeTrace& trace() { return trace_; }
  const DecodeTrace& trace() const { return trace_; }
  TokenSeq& answer() { return answer_; }
  const TokenSeq& answer() const { return answer_; }
  PipelineObserver* observer() const { return observer_; }
  std::size_t blocks_done() const { return trace_.blocks; }

  // Forward over `tokens` causally; returns the logits of the last token.
  // Counts as a prefill pass when more than one token is fed.
  std::vector<float> feed(std::span<const TokenId> tokens, Stage stage);
  // `prefill` marks passes that only encode known tokens; stage-2 body passes
  // carry many rows but each row decodes a new token.
  Logits forward(const ForwardRequest& request, Stage stage, bool prefill);

 private:
  const ForwardEngine* engine_;
  DecodeConfig config_;
  PipelineObserver* observer_;
  KVCache cache_;
  DecodeTrace trace_;
  TokenSeq answer_;
};

enum class BranchStatus { kActive, kTerminated, kCapped };

struct ParallelBlock {
  SequenceLayout layout;
  std::vector<TokenSeq> titles;
  std::vector<TokenSeq> bodies;  // terminator excluded
  std::vector<BranchStatus> status;
  std::vector<std::size_t> finished_at_step;
  std::size_t max_steps = 0;
  std::size_t passes = 0;  // title prefill included

  std::size_t n_branches() const { return titles.size(); }
};

enum class SkeletonStop { kTerm, kEos, kCap };

struct Stage1Result {
  TokenSeq transcript;  // tokens chosen in this stage (plus the opening MARK on loop-back)
  SkeletonStop stop = SkeletonStop::kTerm;
  std::size_t transcript_begin = 0;  // cache index of transcript[0]
  Skeleton skeleton;                 // valid only when parse succeeded
  std::size_t block_start = 0;       // absolute cache index of the first MARK
};

// Decodes the skeleton greedily under logit forcing. `prompt` is fed first;
// when `opens_block` is set the prompt must be the single MARK that re-entered
// stage 1 and it becomes transcript[0].
//
// Throws kNoMarkFound / kMalformedBranch from parsing and
// kSkeletonCapExceeded when a block was opened but not closed within the cap.
Stage1Result run_stage1(DecodeSession& session, std::span<const TokenId> prompt,
                        bool opens_block = false);

// Requires the cache to hold exactly the shared prefix. Re-encodes all branch
// headers in one tree-masked prefill, then advances every branch by one token
// per pass at a shared position until all branches terminate or hit the cap.
ParallelBlock run_stage2(DecodeSession& session, const Skeleton& skeleton);

// MARK title COLON body for every branch in order, then MARK TERM.
TokenSeq flatten_block(const ParallelBlock& block);

struct ContinuationResult {
  TokenSeq tokens;  // appended to the answer; a trailing MARK is not included
  bool loop_back = false;  // a MARK opened another block
  bool eos = false;
};

// Truncates to the shared prefix, prefills the flattened block causally and
// decodes until EOS, a new MARK, or the cap (kContinuationCapExceeded).
ContinuationResult run_stage3(DecodeSession& session, const ParallelBlock& block);

enum class DecodeMode { kNormal, kParallel };

std::string_view mode_name(DecodeMode mode);

struct PipelineResult {
  TokenSeq answer;
  std::string final_text;
  DecodeTrace trace;
};

// Full three-stage run with loop-back and lossless fallback to plain decoding
// when stage 1 produces no marker.
PipelineResult run_pipeline(const ForwardEngine& engine, std::string_view task,
                            const DecodeConfig& config, PipelineObserver* observer = nullptr);

// Baseline: same prompt, plain greedy decoding to EOS.
PipelineResult run_normal(const ForwardEngine& engine, std::string_view task,
                          const DecodeConfig& config);

PipelineResult run_mode(DecodeMode mode, const ForwardEngine& engine, std::string_view task,
                        const DecodeConfig& config, PipelineObserver* observer = nullptr);

}  // namespace treedec
