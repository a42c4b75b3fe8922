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

#include "treedec/types.hpp"

namespace treedec {

// Per-layer key/value store. Every entry also records the token it was
// encoded from and the position id it was rotated with; neither changes once
// written. All layers always share one logical length.
class KVCache {
 public:
  KVCache() = default;
  KVCache(std::size_t n_layers, std::size_t kv_dim);

  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  std::size_t n_layers() const { return keys_.size(); }
  std::size_t kv_dim() const { return kv_dim_; }

  // Appends one zero-initialized entry in every layer.
  void append(TokenId token, PositionId position);

  // Drops every entry with index >= length.
  void truncate(std::size_t length);

  std::span<const TokenId> tokens() const { return tokens_; }
  std::span<const PositionId> positions() const { return positions_; }
  TokenId token(std::size_t index) const { return tokens_[index]; }
  PositionId position(std::size_t index) const { return positions_[index]; }

  std::span<float> key(std::size_t layer, std::size_t index) {
    return {keys_[layer].data() + index * kv_dim_, kv_dim_};
  }
  std::span<const float> key(std::size_t layer, std::size_t index) const {
    return {keys_[layer].data() + index * kv_dim_, kv_dim_};
  }
  std::span<float> value(std::size_t layer, std::size_t index) {
    return {values_[layer].data() + index * kv_dim_, kv_dim_};
  }
  std::span<const float> value(std::size_t layer, std::size_t index) const {
    return {values_[layer].data() + index * kv_dim_, kv_dim_};
  }

  // Bitwise comparison of the first `length` entries (tokens, positions, K, V).
  bool prefix_equals(const KVCache& other, std::size_t length) const;

 private:
  std::size_t kv_dim_ = 0;
  std::vector<TokenId> tokens_;
  std::vector<PositionId> positions_;
  std::vector<std::vector<float>> keys_;
  std::vector<std::vector<float>> values_;
};

// Throws Error(kLengthExceedsCache) when length > cache.size().
void truncate_cache(KVCache& cache, std::size_t length);

}  // namespace treedec
