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

#include <cstddef>
#include <span>
#include <vector>

#include "treedec/model/kv_cache.hpp"
#include "treedec/types.hpp"

namespace treedec {

// One batch of input tokens. mask_rows[i] lists the cache indices token i may
// attend to, counted after this request's tokens are appended; it must include
// the token's own index.
struct ForwardRequest {
  TokenSeq token_ids;
  std::vector<PositionId> position_ids;
  std::vector<std::vector<CacheIndex>> mask_rows;

  std::size_t size() const { return token_ids.size(); }
};

// Row-major [rows x vocab] logits.
class Logits {
 public:
  Logits() = default;
  Logits(std::size_t rows, std::size_t vocab) : vocab_(vocab), data_(rows * vocab, 0.0f) {}

  std::size_t rows() const { return vocab_ == 0 ? 0 : data_.size() / vocab_; }
  std::size_t vocab_size() const { return vocab_; }
  std::span<float> row(std::size_t r) { return {data_.data() + r * vocab_, vocab_}; }
  std::span<const float> row(std::size_t r) const { return {data_.data() + r * vocab_, vocab_}; }

 private:
  std::size_t vocab_ = 0;
  std::vector<float> data_;
};

// Greedy selection with the lowest token id winning ties.
TokenId argmax(std::span<const float> logits);

// Causal rows for `count` tokens appended after `start` existing entries.
std::vector<std::vector<CacheIndex>> causal_rows(std::size_t start, std::size_t count);

// Engines are immutable after construction and may be shared across threads;
// each KVCache belongs to exactly one caller at a time.
class ForwardEngine {
 public:
  virtual ~ForwardEngine() = default;

  virtual std::size_t vocab_size() const = 0;
  virtual KVCache make_cache() const = 0;

  // Appends request.size() entries to `cache` and returns one logit row per
  // input token. Throws kLengthMismatch, kMaskOutOfRange, kNonFiniteLogits.
  virtual Logits forward(const ForwardRequest& request, KVCache& cache) const = 0;

 protected:
  // Shared precondition check; returns the sorted, deduplicated rows.
  static std::vector<std::vector<CacheIndex>> checked_rows(const ForwardRequest& request,
                                                           std::size_t cache_size_before);
};

}  // namespace treedec
