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

#include <functional>
#include <optional>
#include <span>

#include "treedec/model/forward_engine.hpp"

namespace treedec {

// Deterministic next-token rule over the visible tokens of a row, in cache
// order (the row's own token last). std::nullopt means the script has no
// continuation for that context.
using NextTokenFn = std::function<std::optional<TokenId>(std::span<const TokenId> visible)>;

// Rule-based engine: the greedy token of each row is script(visible tokens).
// Logits are 1 for the chosen token and 0 elsewhere, so forcing masks that
// reject the choice fall back to the lowest allowed id.
class ScriptedEngine final : public ForwardEngine {
 public:
  explicit ScriptedEngine(NextTokenFn script, std::size_t vocab_size = 262);

  std::size_t vocab_size() const override { return vocab_size_; }
  KVCache make_cache() const override { return KVCache(0, 0); }
  Logits forward(const ForwardRequest& request, KVCache& cache) const override;

 private:
  NextTokenFn script_;
  std::size_t vocab_size_;
};

// Runs `backbone` for its cache side effects (real K/V entries) but replaces
// its logits with the script's choice. Useful to drive a real model through
// scripted control flow.
class GuidedEngine final : public ForwardEngine {
 public:
  GuidedEngine(const ForwardEngine& backbone, NextTokenFn script);

  std::size_t vocab_size() const override { return backbone_->vocab_size(); }
  KVCache make_cache() const override { return backbone_->make_cache(); }
  Logits forward(const ForwardRequest& request, KVCache& cache) const override;

 private:
  const ForwardEngine* backbone_;
  NextTokenFn script_;
};

}  // namespace treedec
