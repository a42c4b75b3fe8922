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

#include "treedec/layout/sequence_layout.hpp"

namespace treedec {

// visible[q] = sorted key indices query q may attend to.
//
// q sees k iff k == q, or k < q and one of:
//   - k is shared prefix;
//   - k and q are in the same branch and k is a title/body entry;
//   - q is continuation and k is not a pad.
// Pads are therefore invisible to every later query, and branches never see
// one another.
struct TreeMask {
  std::vector<std::vector<CacheIndex>> visible;

  std::size_t size() const { return visible.size(); }
  bool sees(CacheIndex query, CacheIndex key) const;
};

// One row of the mask, computed in O(layout size).
std::vector<CacheIndex> visible_keys(const SequenceLayout& layout, CacheIndex query);

TreeMask tree_mask(const SequenceLayout& layout);

// Rows are queries, columns keys: '1' visible, U+00B7 hidden. One line per row.
std::string render_mask_grid(const TreeMask& mask);

// Same grid prefixed by a role/position column for humans.
std::string render_layout(const SequenceLayout& layout, const TreeMask& mask);

}  // namespace treedec
