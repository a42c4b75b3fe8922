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

#include "treedec/model/kv_cache.hpp"

#include <cstring>
#include <string>

#include "treedec/error.hpp"

namespace treedec {

KVCache::KVCache(std::size_t n_layers, std::size_t kv_dim)
    : kv_dim_(kv_dim), keys_(n_layers), values_(n_layers) {}

void KVCache::append(TokenId token, PositionId position) {
  tokens_.push_back(token);
  positions_.push_back(position);
  for (auto& k : keys_) k.resize(k.size() + kv_dim_, 0.0f);
  for (auto& v : values_) v.resize(v.size() + kv_dim_, 0.0f);
}

void KVCache::truncate(std::size_t length) {
  if (length > size()) {
    throw Error(ErrorCode::kLengthExceedsCache,
                "truncate to " + std::to_string(length) + " but cache holds " +
                    std::to_string(size()));
  }
  tokens_.resize(length);
  positions_.resize(length);
  for (auto& k : keys_) k.resize(length * kv_dim_);
  for (auto& v : values_) v.resize(length * kv_dim_);
}

bool KVCache::prefix_equals(const KVCache& other, std::size_t length) const {
  if (length > size() || length > other.size()) return false;
  if (kv_dim_ != other.kv_dim_ || n_layers() != other.n_layers()) return false;
  if (length == 0) return true;
  if (std::memcmp(tokens_.data(), other.tokens_.data(), length * sizeof(TokenId)) != 0) {
    return false;
  }
  if (std::memcmp(positions_.data(), other.positions_.data(), length * sizeof(PositionId)) != 0) {
    return false;
  }
  const std::size_t bytes = length * kv_dim_ * sizeof(float);
  for (std::size_t l = 0; l < n_layers(); ++l) {
    if (std::memcmp(keys_[l].data(), other.keys_[l].data(), bytes) != 0) return false;
    if (std::memcmp(values_[l].data(), other.values_[l].data(), bytes) != 0) return false;
  }
  return true;
}

void truncate_cache(KVCache& cache, std::size_t length) { cache.truncate(length); }

}  // namespace treedec
