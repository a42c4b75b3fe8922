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

#include "treedec/pipeline/pipeline.hpp"

#include <algorithm>
#include <chrono>

#include "treedec/error.hpp"
#include "treedec/layout/tree_mask.hpp"
#include "treedec/skeleton/prompt.hpp"
#include "treedec/skeleton/vocabulary.hpp"

namespace treedec {
namespace {

class StageTimer {
 public:
  StageTimer(DecodeTrace& trace, Stage stage)
      : stats_(trace.at(stage)), start_(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    const auto dt = std::chrono::steady_clock::now() - start_;
    stats_.wall_ms += std::chrono::duration<double, std::milli>(dt).count();
  }
  StageTimer(const StageTimer&) = delete;
  StageTimer& operator=(const StageTimer&) = delete;

 private:
  StageStats& stats_;
  std::chrono::steady_clock::time_point start_;
};

bool ends_branch(TokenId t) {
  return t == vocab::kMark || t == vocab::kTerm || t == vocab::kEos || t == vocab::kPad;
}

void checkpoint(DecodeSession& s, Checkpoint point, std::size_t block_start) {
  if (auto* obs = s.observer()) obs->on_checkpoint(point, s.blocks_done(), s.cache(), block_start);
}

// Greedy free decoding from `logits` until EOS, MARK (if loop_on_mark) or cap.
ContinuationResult continue_free(DecodeSession& s, std::vector<float> logits, Stage stage,
                                 std::size_t cap, bool loop_on_mark) {
  ContinuationResult out;
  auto& stats = s.trace().at(stage);
  while (true) {
    const TokenId tok = argmax(logits);
    ++stats.tokens_emitted;
    if (loop_on_mark && tok == vocab::kMark) {
      out.loop_back = true;
      return out;
    }
    out.tokens.push_back(tok);
    s.answer().push_back(tok);
    if (tok == vocab::kEos) {
      out.eos = true;
      return out;
    }
    if (out.tokens.size() >= cap) {
      if (s.config().cap_is_error) {
        throw Error(ErrorCode::kContinuationCapExceeded,
                    "no EOS within " + std::to_string(cap) + " tokens");
      }
      return out;
    }
    const TokenId one[] = {tok};
    logits = s.feed(one, stage);
  }
}

bool has_mark(const TokenSeq& tokens) {
  return std::find(tokens.begin(), tokens.end(), vocab::kMark) != tokens.end();
}

}  // namespace

DecodeSession::DecodeSession(const ForwardEngine& engine, DecodeConfig config,
                             PipelineObserver* observer)
    : engine_(&engine), config_(config), observer_(observer), cache_(engine.make_cache()) {
  config_.validate();
}

Logits DecodeSession::forward(const ForwardRequest& request, Stage stage, bool prefill) {
  auto& stats = trace_.at(stage);
  ++stats.forward_passes;
  if (prefill) ++stats.prefill_passes;
  return engine_->forward(request, cache_);
}

std::vector<float> DecodeSession::feed(std::span<const TokenId> tokens, Stage stage) {
  ForwardRequest req;
  const std::size_t base = cache_.size();
  req.token_ids.assign(tokens.begin(), tokens.end());
  req.position_ids.resize(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    req.position_ids[i] = static_cast<PositionId>(base + i);
  }
  req.mask_rows = causal_rows(base, tokens.size());
  const Logits logits = forward(req, stage, tokens.size() > 1);
  const auto last = logits.row(logits.rows() - 1);
  return {last.begin(), last.end()};
}

namespace {

// Stage-1 decoding without the parse.
Stage1Result decode_skeleton(DecodeSession& s, std::span<const TokenId> prompt, bool opens_block) {
  StageTimer timer(s.trace(), Stage::kSkeleton);
  auto& stats = s.trace().at(Stage::kSkeleton);
  Stage1Result out;
  ForcingState state;
  if (opens_block) {
    if (prompt.size() != 1 || prompt[0] != vocab::kMark) {
      throw Error(ErrorCode::kLengthMismatch, "re-entry prompt must be a single MARK");
    }
    out.transcript_begin = s.cache().size();
    out.transcript.push_back(vocab::kMark);
    state = state.advance(vocab::kMark);
  } else {
    out.transcript_begin = s.cache().size() + prompt.size();
  }
  if (prompt.empty()) throw Error(ErrorCode::kLengthMismatch, "stage 1 needs a prompt");

  std::vector<float> logits = s.feed(prompt, Stage::kSkeleton);
  std::size_t emitted = 0;
  while (true) {
    const ForcingState before = state;
    const ForcedChoice choice = apply_forcing(state, logits);
    if (auto* obs = s.observer()) obs->on_forced_token(before, choice.logits, choice.token);
    state = choice.next;
    out.transcript.push_back(choice.token);
    ++emitted;
    ++stats.tokens_emitted;
    if (choice.token == vocab::kTerm) {
      out.stop = SkeletonStop::kTerm;
      break;
    }
    if (choice.token == vocab::kEos) {
      out.stop = SkeletonStop::kEos;
      break;
    }
    if (emitted >= s.config().max_skeleton_tokens) {
      out.stop = SkeletonStop::kCap;
      break;
    }
    const TokenId one[] = {choice.token};
    logits = s.feed(one, Stage::kSkeleton);
  }
  return out;
}

}  // namespace

Stage1Result run_stage1(DecodeSession& s, std::span<const TokenId> prompt, bool opens_block) {
  Stage1Result out = decode_skeleton(s, prompt, opens_block);
  if (out.stop == SkeletonStop::kCap && has_mark(out.transcript) && s.config().cap_is_error) {
    throw Error(ErrorCode::kSkeletonCapExceeded,
                "block not closed within " + std::to_string(s.config().max_skeleton_tokens) +
                    " tokens");
  }
  out.skeleton = parse_skeleton(out.transcript);
  out.block_start = out.transcript_begin + out.skeleton.block_start;
  checkpoint(s, Checkpoint::kSkeletonDone, out.block_start);
  return out;
}

ParallelBlock run_stage2(DecodeSession& s, const Skeleton& skeleton) {
  StageTimer timer(s.trace(), Stage::kParallel);
  auto& stats = s.trace().at(Stage::kParallel);
  if (skeleton.n_branches() == 0) throw Error(ErrorCode::kEmptyBranchSet, "skeleton has no branches");

  const std::size_t n = skeleton.n_branches();
  const std::size_t prefix = s.cache().size();
  std::vector<TokenSeq> headers;
  std::vector<std::size_t> header_lens;
  for (const auto& title : skeleton.titles) {
    headers.push_back(branch_header(title));
    header_lens.push_back(headers.back().size());
  }

  ParallelBlock block{
      .layout = build_layout(prefix, header_lens),
      .titles = skeleton.titles,
      .bodies = std::vector<TokenSeq>(n),
      .status = std::vector<BranchStatus>(n, BranchStatus::kActive),
      .finished_at_step = std::vector<std::size_t>(n, 0),
      .max_steps = s.config().max_steps_per_branch,
  };
  const std::size_t block_index = s.blocks_done();
  auto record_pass = [&](const ForwardRequest& req, bool title_prefill) {
    s.trace().parallel_passes.push_back({block_index, title_prefill, req.position_ids});
  };

  // Title prefill: every header token under tree isolation; the last token of
  // each header yields that branch's step-0 token.
  ForwardRequest req;
  std::vector<std::size_t> last_row(n);
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t j = 0; j < headers[b].size(); ++j) {
      const CacheIndex idx = block.layout.title_index(b, j);
      req.token_ids.push_back(headers[b][j]);
      req.position_ids.push_back(block.layout.at(idx).position);
      req.mask_rows.push_back(visible_keys(block.layout, idx));
    }
    last_row[b] = req.token_ids.size() - 1;
  }
  Logits logits = s.forward(req, Stage::kParallel, true);
  record_pass(req, true);
  block.passes = 1;
  checkpoint(s, Checkpoint::kTitlesEncoded, prefix);

  std::vector<TokenId> next(n);
  for (std::size_t b = 0; b < n; ++b) {
    next[b] = argmax(logits.row(last_row[b]));
    if (auto* obs = s.observer()) obs->on_branch_token(block_index, b, 0, logits.row(last_row[b]), next[b]);
  }

  for (std::size_t step = 0;; ++step) {
    bool any_active = false;
    for (std::size_t b = 0; b < n; ++b) {
      if (block.status[b] != BranchStatus::kActive) continue;
      ++stats.tokens_emitted;
      if (ends_branch(next[b])) {
        block.status[b] = BranchStatus::kTerminated;
        block.finished_at_step[b] = step;
      } else {
        block.bodies[b].push_back(next[b]);
        any_active = true;
      }
    }
    if (!any_active) break;
    if (step + 1 >= block.max_steps) {
      for (std::size_t b = 0; b < n; ++b) {
        if (block.status[b] == BranchStatus::kActive) {
          block.status[b] = BranchStatus::kCapped;
          block.finished_at_step[b] = step + 1;
        }
      }
      break;
    }

    std::vector<bool> padded(n);
    for (std::size_t b = 0; b < n; ++b) padded[b] = block.status[b] != BranchStatus::kActive;
    const CacheIndex first = block.layout.append_step(padded);
    ForwardRequest pass;
    const PositionId pos = step_positions(block.layout, step);
    for (std::size_t b = 0; b < n; ++b) {
      pass.token_ids.push_back(padded[b] ? vocab::kPad : block.bodies[b].back());
      pass.position_ids.push_back(pos);
      pass.mask_rows.push_back(visible_keys(block.layout, first + static_cast<CacheIndex>(b)));
    }
    logits = s.forward(pass, Stage::kParallel, false);
    record_pass(pass, false);
    ++block.passes;
    checkpoint(s, Checkpoint::kParallelStep, prefix);
    for (std::size_t b = 0; b < n; ++b) {
      if (padded[b]) continue;
      next[b] = argmax(logits.row(b));
      if (auto* obs = s.observer()) obs->on_branch_token(block_index, b, step + 1, logits.row(b), next[b]);
    }
  }

  BlockRecord rec;
  rec.block_start = prefix;
  rec.n_branches = n;
  rec.max_header_len = block.layout.max_title_len();
  for (std::size_t b = 0; b < n; ++b) {
    rec.body_lengths.push_back(block.bodies[b].size());
    rec.capped.push_back(block.status[b] == BranchStatus::kCapped);
  }
  rec.stage2_passes = block.passes;
  s.trace().block_records.push_back(std::move(rec));
  return block;
}

TokenSeq flatten_block(const ParallelBlock& block) {
  TokenSeq out;
  for (std::size_t b = 0; b < block.n_branches(); ++b) {
    const auto header = branch_header(block.titles[b]);
    out.insert(out.end(), header.begin(), header.end());
    out.insert(out.end(), block.bodies[b].begin(), block.bodies[b].end());
  }
  out.push_back(vocab::kMark);
  out.push_back(vocab::kTerm);
  return out;
}

ContinuationResult run_stage3(DecodeSession& s, const ParallelBlock& block) {
  StageTimer timer(s.trace(), Stage::kContinuation);
  const std::size_t prefix = block.layout.block_start();
  truncate_cache(s.cache(), prefix);
  const TokenSeq flat = flatten_block(block);
  s.answer().insert(s.answer().end(), flat.begin(), flat.end());
  auto logits = s.feed(flat, Stage::kContinuation);
  checkpoint(s, Checkpoint::kFlattenEncoded, prefix);
  auto result = continue_free(s, std::move(logits), Stage::kContinuation,
                              s.config().max_continuation_tokens, true);
  checkpoint(s, Checkpoint::kContinuationDone, prefix);
  return result;
}

std::string_view mode_name(DecodeMode mode) {
  return mode == DecodeMode::kNormal ? "normal" : "parallel";
}

PipelineResult run_pipeline(const ForwardEngine& engine, std::string_view task,
                            const DecodeConfig& config, PipelineObserver* observer) {
  DecodeSession s(engine, config, observer);
  s.trace().mode = "parallel";
  const TokenSeq prompt = stage1_prompt(task);
  const TokenSeq reopen = {vocab::kMark};
  std::span<const TokenId> pending = prompt;
  bool opens_block = false;

  while (true) {
    Stage1Result s1 = decode_skeleton(s, pending, opens_block);
    const bool marked = has_mark(s1.transcript);
    if (s1.stop == SkeletonStop::kCap && marked && config.cap_is_error) {
      throw Error(ErrorCode::kSkeletonCapExceeded,
                  "block not closed within " + std::to_string(config.max_skeleton_tokens) +
                      " tokens");
    }
    bool parsed = false;
    try {
      s1.skeleton = parse_skeleton(s1.transcript);
      parsed = true;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoMarkFound) throw;
    }

    if (!parsed) {
      // No block was opened, so the transcript is exactly what plain decoding
      // would have produced: keep it and continue plainly from its last token.
      s.trace().fallback = true;
      s.answer().insert(s.answer().end(), s1.transcript.begin(), s1.transcript.end());
      if (s1.stop == SkeletonStop::kEos) break;
      StageTimer timer(s.trace(), Stage::kContinuation);
      const TokenId last[] = {s1.transcript.back()};
      auto logits = s.feed(last, Stage::kContinuation);
      const auto cont = continue_free(s, std::move(logits), Stage::kContinuation,
                                      config.max_continuation_tokens, true);
      if (!cont.loop_back) break;
      pending = reopen;
      opens_block = true;
      continue;
    }

    s1.block_start = s1.transcript_begin + s1.skeleton.block_start;
    checkpoint(s, Checkpoint::kSkeletonDone, s1.block_start);
    s.answer().insert(s.answer().end(), s1.transcript.begin(),
                      s1.transcript.begin() + static_cast<std::ptrdiff_t>(s1.skeleton.block_start));
    truncate_cache(s.cache(), s1.block_start);
    const ParallelBlock block = run_stage2(s, s1.skeleton);
    const auto cont = run_stage3(s, block);
    ++s.trace().blocks;
    if (!cont.loop_back) break;
    if (s.trace().blocks >= config.max_blocks) {
      if (config.cap_is_error) {
        throw Error(ErrorCode::kContinuationCapExceeded,
                    "more than " + std::to_string(config.max_blocks) + " parallel blocks");
      }
      break;
    }
    pending = reopen;
    opens_block = true;
  }

  PipelineResult out;
  out.answer = s.answer();
  out.final_text = vocab::decode(out.answer);
  s.trace().answer_tokens = out.answer.size();
  s.trace().final_text = out.final_text;
  out.trace = s.trace();
  return out;
}

PipelineResult run_normal(const ForwardEngine& engine, std::string_view task,
                          const DecodeConfig& config) {
  DecodeSession s(engine, config);
  s.trace().mode = "normal";
  const TokenSeq prompt = stage1_prompt(task);
  {
    StageTimer timer(s.trace(), Stage::kNormal);
    auto logits = s.feed(prompt, Stage::kNormal);
    continue_free(s, std::move(logits), Stage::kNormal, config.max_normal_tokens, false);
  }
  PipelineResult out;
  out.answer = s.answer();
  out.final_text = vocab::decode(out.answer);
  s.trace().answer_tokens = out.answer.size();
  s.trace().final_text = out.final_text;
  out.trace = s.trace();
  return out;
}

PipelineResult run_mode(DecodeMode mode, const ForwardEngine& engine, std::string_view task,
                        const DecodeConfig& config, PipelineObserver* observer) {
  return mode == DecodeMode::kNormal ? run_normal(engine, task, config)
                                     : run_pipeline(engine, task, config, observer);
}

}  // namespace treedec
