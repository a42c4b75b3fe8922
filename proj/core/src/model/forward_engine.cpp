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

#include "treedec/model/forward_engine.hpp"

#include <algorithm>
#include <functional>
#include <string>

#include "treedec/error.hpp"

namespace treedec {

TokenId argmax(std::span<const float> logits) {
  TokenId best = 0;
  for (std::size_t i = 1; i < logits.size(); ++i) {
    if (logits[i] > logits[static_cast<std::size_t>(best)]) best = static_cast<TokenId>(i);
  }
  return best;
}

std::vector<std::vector<CacheIndex>> causal_rows(std::size_t start, std::size_t count) {
  std::vector<std::vector<CacheIndex>> rows(count);
  for (std::size_t r = 0; r < count; ++r) {
    rows[r].resize(start + r + 1);
    for (std::size_t k = 0; k <= start + r; ++k) rows[r][k] = static_cast<CacheIndex>(k);
  }
  return rows;
}

std::vector<std::vector<CacheIndex>> ForwardEngine::checked_rows(const ForwardRequest& request,
                                                                 std::size_t cache_size_before) {
  const std::size_t n = request.token_ids.size();
  if (request.position_ids.size() != n || request.mask_rows.size() != n) {
    throw Error(ErrorCode::kLengthMismatch,
                "token_ids=" + std::to_string(n) +
                    " position_ids=" + std::to_string(request.position_ids.size()) +
                    " mask_rows=" + std::to_string(request.mask_rows.size()));
  }
  const std::size_t limit = cache_size_before + n;
  std::vector<std::vector<CacheIndex>> rows(n);
  for (std::size_t r = 0; r < n; ++r) {
    auto row = request.mask_rows[r];
    if (std::adjacent_find(row.begin(), row.end(), std::greater_equal<CacheIndex>()) != row.end()) {
      std::sort(row.begin(), row.end());
      row.erase(std::unique(row.begin(), row.end()), row.end());
    }
    if (!row.empty() && row.back() >= limit) {
      throw Error(ErrorCode::kMaskOutOfRange,
                  "row " + std::to_string(r) + " references index " + std::to_string(row.back()) +
                      " but cache will hold " + std::to_string(limit));
    }
    const auto self = static_cast<CacheIndex>(cache_size_before + r);
    if (!std::binary_search(row.begin(), row.end(), self)) {
      throw Error(ErrorCode::kMaskOutOfRange,
                  "row " + std::to_string(r) + " does not include its own index " +
                      std::to_string(self));
    }
    rows[r] = std::move(row);
  }
  return rows;
}

}  // namespace treedec
