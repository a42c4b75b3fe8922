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

#include "treedec/layout/tree_mask.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace treedec {

bool TreeMask::sees(CacheIndex query, CacheIndex key) const {
  const auto& row = visible.at(query);
  return std::binary_search(row.begin(), row.end(), key);
}

std::vector<CacheIndex> visible_keys(const SequenceLayout& layout, CacheIndex query) {
  if (query >= layout.size()) throw std::out_of_range("query outside layout");
  const auto& q = layout.at(query).kind;
  std::vector<CacheIndex> row;
  const std::size_t prefix_end = std::min<std::size_t>(layout.block_start(), query);
  row.reserve(prefix_end + 1);
  for (CacheIndex k = 0; k < prefix_end; ++k) row.push_back(k);
  if (query < layout.block_start()) {
    row.push_back(query);
    return row;
  }
  for (CacheIndex k = static_cast<CacheIndex>(layout.block_start()); k < query; ++k) {
    const auto& kind = layout.at(k).kind;
    if (kind.role == SegmentRole::kPad) continue;
    if (q.role == SegmentRole::kContinuation ||
        (q.in_branch() && kind.in_branch() && kind.branch == q.branch)) {
      row.push_back(k);
    }
  }
  row.push_back(query);
  return row;
}

TreeMask tree_mask(const SequenceLayout& layout) {
  TreeMask mask;
  mask.visible.reserve(layout.size());
  for (CacheIndex q = 0; q < layout.size(); ++q) mask.visible.push_back(visible_keys(layout, q));
  return mask;
}

std::string render_mask_grid(const TreeMask& mask) {
  std::string out;
  const std::size_t n = mask.size();
  for (std::size_t q = 0; q < n; ++q) {
    const auto& row = mask.visible[q];
    std::size_t next = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (next < row.size() && row[next] == k) {
        out += '1';
        ++next;
      } else {
        out += "·";
      }
    }
    out += '\n';
  }
  return out;
}

std::string render_layout(const SequenceLayout& layout, const TreeMask& mask) {
  std::istringstream grid(render_mask_grid(mask));
  std::ostringstream out;
  std::string line;
  for (const auto& e : layout.entries()) {
    std::getline(grid, line);
    std::string label;
    switch (e.kind.role) {
      case SegmentRole::kSharedPrefix: label = "P"; break;
      case SegmentRole::kBranchTitle: label = "T" + std::to_string(e.kind.branch); break;
      case SegmentRole::kBranchBody:
        label = "B" + std::to_string(e.kind.branch) + "." + std::to_string(e.kind.step);
        break;
      case SegmentRole::kPad:
        label = "_" + std::to_string(e.kind.branch) + "." + std::to_string(e.kind.step);
        break;
      case SegmentRole::kContinuation: label = "C"; break;
    }
    label.resize(7, ' ');
    std::string pos = std::to_string(e.position);
    pos.insert(0, pos.size() < 4 ? 4 - pos.size() : 0, ' ');
    out << label << pos << "  " << line << '\n';
  }
  return out.str();
}

}  // namespace treedec
