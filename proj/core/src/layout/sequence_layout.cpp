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

#include "treedec/layout/sequence_layout.hpp"

#include <algorithm>
#include <stdexcept>

#include "treedec/error.hpp"

namespace treedec {

SequenceLayout SequenceLayout::build(std::size_t prefix_len,
                                     std::span<const std::size_t> title_lens) {
  if (title_lens.empty()) throw Error(ErrorCode::kEmptyBranchSet, "layout needs >= 1 branch");
  SequenceLayout layout;
  layout.block_start_ = prefix_len;
  layout.title_lens_.assign(title_lens.begin(), title_lens.end());
  layout.max_title_len_ = *std::max_element(title_lens.begin(), title_lens.end());

  std::size_t total = prefix_len;
  for (std::size_t len : title_lens) {
    if (len == 0) throw Error(ErrorCode::kInvalidConfig, "branch title must be non-empty");
    total += len;
  }
  layout.entries_.reserve(total);
  for (std::size_t i = 0; i < prefix_len; ++i) {
    layout.entries_.push_back({static_cast<CacheIndex>(i), {}, static_cast<PositionId>(i)});
  }
  for (std::size_t b = 0; b < title_lens.size(); ++b) {
    layout.title_offsets_.push_back(layout.entries_.size());
    for (std::size_t j = 0; j < title_lens[b]; ++j) {
      layout.entries_.push_back({static_cast<CacheIndex>(layout.entries_.size()),
                                 {SegmentRole::kBranchTitle, static_cast<std::uint32_t>(b),
                                  static_cast<std::uint32_t>(j)},
                                 static_cast<PositionId>(prefix_len + j)});
    }
  }
  return layout;
}

CacheIndex SequenceLayout::append_step(const std::vector<bool>& padded) {
  if (closed_) throw std::logic_error("append_step after continuation");
  if (padded.size() != n_branches()) {
    throw Error(ErrorCode::kLengthMismatch, "one pad flag per branch required");
  }
  const auto first = static_cast<CacheIndex>(entries_.size());
  const auto position = step_positions(*this, steps_);
  for (std::size_t b = 0; b < n_branches(); ++b) {
    const auto role = padded[b] ? SegmentRole::kPad : SegmentRole::kBranchBody;
    entries_.push_back({static_cast<CacheIndex>(entries_.size()),
                        {role, static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(steps_)},
                        position});
  }
  ++steps_;
  return first;
}

CacheIndex SequenceLayout::append_continuation() {
  closed_ = true;
  PositionId next = 0;
  for (const auto& e : entries_) next = std::max(next, e.position + 1);
  const auto index = static_cast<CacheIndex>(entries_.size());
  entries_.push_back({index, {SegmentRole::kContinuation, 0, 0}, next});
  return index;
}

CacheIndex SequenceLayout::title_index(std::size_t branch, std::size_t offset) const {
  return static_cast<CacheIndex>(title_offsets_.at(branch) + offset);
}

void SequenceLayout::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); };
  if (n_branches() == 0) throw Error(ErrorCode::kEmptyBranchSet, "layout has no branches");
  std::vector<std::int64_t> last_step(n_branches(), -1);
  std::vector<std::int64_t> last_title(n_branches(), -1);
  std::vector<PositionId> step_position;
  bool seen_continuation = false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.index != i) fail("cache indices are not contiguous at " + std::to_string(i));
    const auto& k = e.kind;
    if (k.in_branch() && k.branch >= n_branches()) fail("branch id out of range");
    switch (k.role) {
      case SegmentRole::kSharedPrefix:
        if (i >= block_start_) fail("shared prefix entry at or after block_start");
        if (e.position != static_cast<PositionId>(i)) fail("prefix position != index");
        break;
      case SegmentRole::kBranchTitle:
        if (i < block_start_) fail("title entry before block_start");
        if (last_step[k.branch] >= 0) fail("title after body in branch");
        if (static_cast<std::int64_t>(k.step) != last_title[k.branch] + 1) {
          fail("title offsets not contiguous");
        }
        last_title[k.branch] = k.step;
        if (e.position != static_cast<PositionId>(block_start_ + k.step)) {
          fail("title position does not restart at block_start");
        }
        break;
      case SegmentRole::kBranchBody:
      case SegmentRole::kPad: {
        if (i < block_start_) fail("body entry before block_start");
        if (seen_continuation) fail("body entry after continuation");
        if (static_cast<std::int64_t>(k.step) <= last_step[k.branch]) {
          fail("body steps not strictly increasing");
        }
        last_step[k.branch] = k.step;
        if (step_position.size() <= k.step) step_position.resize(k.step + 1, -1);
        if (step_position[k.step] == -1) {
          step_position[k.step] = e.position;
        } else if (step_position[k.step] != e.position) {
          fail("rows of one step carry different positions");
        }
        if (k.step > 0 && step_position[k.step - 1] != -1 &&
            e.position != step_position[k.step - 1] + 1) {
          fail("step positions not consecutive");
        }
        break;
      }
      case SegmentRole::kContinuation:
        seen_continuation = true;
        break;
    }
  }
}

PositionId step_positions(const SequenceLayout& layout, std::size_t step) {
  return static_cast<PositionId>(layout.block_start() + layout.max_title_len() + step);
}

}  // namespace treedec
