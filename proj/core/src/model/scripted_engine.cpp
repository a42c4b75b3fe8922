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

#include "treedec/model/scripted_engine.hpp"

#include <string>

#include "treedec/error.hpp"

namespace treedec {

namespace {

// One-hot rows for the script's choice given each row's visible tokens.
// `cache` already holds the request's tokens.
Logits script_logits(const NextTokenFn& script, const std::vector<std::vector<CacheIndex>>& rows,
                     const KVCache& cache, std::size_t vocab_size) {
  Logits logits(rows.size(), vocab_size);
  TokenSeq visible;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    visible.clear();
    visible.reserve(rows[r].size());
    for (CacheIndex k : rows[r]) visible.push_back(cache.token(k));
    const auto next = script(visible);
    if (!next) {
      throw Error(ErrorCode::kScriptUndefinedContinuation,
                  "no continuation for row " + std::to_string(r) + " (" +
                      std::to_string(visible.size()) + " visible tokens)");
    }
    if (*next < 0 || static_cast<std::size_t>(*next) >= vocab_size) {
      throw Error(ErrorCode::kInvalidToken, "script produced token " + std::to_string(*next));
    }
    logits.row(r)[static_cast<std::size_t>(*next)] = 1.0f;
  }
  return logits;
}

}  // namespace

ScriptedEngine::ScriptedEngine(NextTokenFn script, std::size_t vocab_size)
    : script_(std::move(script)), vocab_size_(vocab_size) {}

Logits ScriptedEngine::forward(const ForwardRequest& request, KVCache& cache) const {
  const auto rows = checked_rows(request, cache.size());
  for (std::size_t r = 0; r < request.size(); ++r) {
    cache.append(request.token_ids[r], request.position_ids[r]);
  }
  return script_logits(script_, rows, cache, vocab_size_);
}

GuidedEngine::GuidedEngine(const ForwardEngine& backbone, NextTokenFn script)
    : backbone_(&backbone), script_(std::move(script)) {}

Logits GuidedEngine::forward(const ForwardRequest& request, KVCache& cache) const {
  const auto rows = checked_rows(request, cache.size());
  backbone_->forward(request, cache);
  return script_logits(script_, rows, cache, backbone_->vocab_size());
}

}  // namespace treedec
