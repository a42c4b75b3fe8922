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

#include "treedec/harness/script_engine.hpp"

#include <algorithm>
#include <memory>

#include "treedec/skeleton/prompt.hpp"
#include "treedec/skeleton/vocabulary.hpp"

namespace treedec {
namespace {

struct EncodedBlock {
  std::vector<TokenSeq> titles;
  std::vector<TokenSeq> bodies;
};

struct EncodedTask {
  TokenSeq prompt;
  std::vector<TokenSeq> texts;
  std::vector<EncodedBlock> blocks;
  std::vector<ConclusionRule> rules;
  std::vector<std::string> raw_texts;
  std::vector<ScriptBlock> raw_blocks;
};

bool starts_with(std::span<const TokenId> a, std::span<const TokenId> prefix) {
  return a.size() >= prefix.size() && std::equal(prefix.begin(), prefix.end(), a.begin());
}

// Text segment k (k >= 1) as the model would write it after seeing the
// completed steps of block k-1.
TokenSeq text_after_block(const EncodedTask& task, std::size_t k,
                          const std::vector<std::size_t>& completed) {
  const auto& rule = task.rules[k - 1];
  if (rule.kind == ConclusionRule::Kind::kFixed) return task.texts[k];
  const auto& block = task.raw_blocks[k - 1];
  std::string found = rule.not_found;
  for (std::size_t i : completed) {
    const auto& body = block.bodies[i];
    const auto at = body.find(rule.marker);
    if (at == std::string::npos) continue;
    if (rule.kind == ConclusionRule::Kind::kTitleOfMarked) {
      found = block.titles[i];
    } else {
      const auto from = at + rule.marker.size();
      const auto to = body.find(rule.stop, from);
      found = body.substr(from, to == std::string::npos ? std::string::npos : to - from);
    }
    break;
  }
  return vocab::encode(rule.text + found + task.raw_texts[k]);
}

// Either the next token (answer is a proper prefix) or "advance" (matched).
enum class Match { kNext, kMatched, kMismatch };

Match match_seq(std::span<const TokenId> a, std::size_t& i, const TokenSeq& expected,
                TokenId& next) {
  const std::size_t rem = a.size() - i;
  const std::size_t common = std::min(rem, expected.size());
  if (!std::equal(expected.begin(), expected.begin() + static_cast<std::ptrdiff_t>(common),
                  a.begin() + static_cast<std::ptrdiff_t>(i))) {
    return Match::kMismatch;
  }
  if (rem < expected.size()) {
    next = expected[rem];
    return Match::kNext;
  }
  i += expected.size();
  return Match::kMatched;
}

std::optional<TokenId> next_token(const EncodedTask& task, std::span<const TokenId> visible) {
  if (visible.size() < task.prompt.size()) {
    // Prefill rows inside the prompt: continue the prompt itself.
    if (!starts_with(task.prompt, visible)) return std::nullopt;
    return task.prompt[visible.size()];
  }
  if (!starts_with(visible, task.prompt)) return std::nullopt;
  const auto a = visible.subspan(task.prompt.size());
  if (!a.empty() && a.back() == vocab::kPad) return vocab::kPad;

  std::size_t i = 0;
  TokenId next = 0;
  std::vector<std::size_t> completed;
  for (std::size_t k = 0; k <= task.blocks.size(); ++k) {
    const TokenSeq text = k == 0 ? task.texts[0] : text_after_block(task, k, completed);
    switch (match_seq(a, i, text, next)) {
      case Match::kNext: return next;
      case Match::kMismatch: return std::nullopt;
      case Match::kMatched: break;
    }
    if (k == task.blocks.size()) break;

    const auto& block = task.blocks[k];
    const std::size_t n = block.titles.size();
    std::size_t done = 0;
    completed.clear();
    while (true) {
      if (i == a.size()) return vocab::kMark;
      if (a[i] != vocab::kMark) return std::nullopt;
      ++i;
      if (i == a.size()) return done < n ? block.titles[done].front() : vocab::kTerm;
      if (a[i] == vocab::kTerm) {
        ++i;
        break;
      }
      std::size_t j = i;
      while (j < a.size() && a[j] != vocab::kColon) ++j;
      const std::span<const TokenId> title = a.subspan(i, j - i);
      if (j == a.size()) {
        // Mid-title: continue the expected title, else any title it prefixes.
        const TokenSeq* cand = nullptr;
        if (done < n && starts_with(block.titles[done], title)) {
          cand = &block.titles[done];
        } else {
          for (const auto& t : block.titles) {
            if (starts_with(t, title)) {
              cand = &t;
              break;
            }
          }
        }
        if (!cand) return std::nullopt;
        return cand->size() > title.size() ? (*cand)[title.size()] : vocab::kColon;
      }
      std::size_t branch = n;
      for (std::size_t b = 0; b < n; ++b) {
        if (std::equal(title.begin(), title.end(), block.titles[b].begin(), block.titles[b].end())) {
          branch = b;
          break;
        }
      }
      if (branch == n) return std::nullopt;
      i = j + 1;
      if (i < a.size() && a[i] == vocab::kEllipsis) {
        ++i;
        ++done;
        continue;
      }
      switch (match_seq(a, i, block.bodies[branch], next)) {
        case Match::kNext: return next;
        case Match::kMismatch: return std::nullopt;
        case Match::kMatched: break;
      }
      completed.push_back(branch);
      ++done;
    }
  }
  if (i == a.size()) return vocab::kEos;
  return std::nullopt;
}

}  // namespace

NextTokenFn answer_script(const TaskScript& task) {
  task.validate();
  auto enc = std::make_shared<EncodedTask>();
  enc->prompt = stage1_prompt(task.task_text);
  for (const auto& t : task.texts) enc->texts.push_back(vocab::encode(t));
  for (const auto& b : task.blocks) {
    EncodedBlock eb;
    for (const auto& t : b.titles) eb.titles.push_back(vocab::encode(t));
    for (const auto& body : b.bodies) eb.bodies.push_back(vocab::encode(body));
    enc->blocks.push_back(std::move(eb));
  }
  enc->rules = task.rules;
  enc->raw_texts = task.texts;
  enc->raw_blocks = task.blocks;
  return [enc](std::span<const TokenId> visible) { return next_token(*enc, visible); };
}

std::unique_ptr<ScriptedEngine> scripted_engine(const TaskScript& task) {
  return std::make_unique<ScriptedEngine>(answer_script(task));
}

}  // namespace treedec
