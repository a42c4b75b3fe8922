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
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "treedec/types.hpp"

namespace treedec {

enum class SegmentRole : std::uint8_t {
  kSharedPrefix,
  kBranchTitle,
  kBranchBody,
  kPad,
  kContinuation,
};

// Role of one cache slot. `branch` is meaningful for title/body/pad entries;
// `step` is the title offset for titles and the decode step for body/pad.
struct SegmentKind {
  SegmentRole role = SegmentRole::kSharedPrefix;
  std::uint32_t branch = 0;
  std::uint32_t step = 0;

  bool in_branch() const {
    return role == SegmentRole::kBranchTitle || role == SegmentRole::kBranchBody ||
           role == SegmentRole::kPad;
  }
  bool operator==(const SegmentKind&) const = default;
};

struct LayoutEntry {
  CacheIndex index = 0;
  SegmentKind kind;
  PositionId position = 0;
};

// Maps every cache slot of a sequence holding one parallel block to its role
// and position id. Storage order: prefix, titles branch-major, body/pad
// entries step-major, then continuation.
//
// Positions: the prefix is numbered 0..block_start-1; every branch's title
// restarts at block_start; all rows of body step t share
// block_start + max_title_len + t.
class SequenceLayout {
 public:
  // Throws Error(kEmptyBranchSet) for zero branches and kInvalidConfig for an
  // empty title.
  static SequenceLayout build(std::size_t prefix_len, std::span<const std::size_t> title_lens);

  // Appends one body-or-pad entry per branch for the next step; padded[b]
  // selects Pad for branch b. Returns the index of the first new entry.
  CacheIndex append_step(const std::vector<bool>& padded);

  // Appends a continuation slot positioned after every existing entry.
  CacheIndex append_continuation();

  std::size_t size() const { return entries_.size(); }
  const std::vector<LayoutEntry>& entries() const { return entries_; }
  const LayoutEntry& at(CacheIndex index) const { return entries_[index]; }

  std::size_t n_branches() const { return title_lens_.size(); }
  std::size_t block_start() const { return block_start_; }
  std::size_t title_len(std::size_t branch) const { return title_lens_[branch]; }
  std::size_t max_title_len() const { return max_title_len_; }
  std::size_t steps() const { return steps_; }

  // Cache index of title token `offset` of `branch`.
  CacheIndex title_index(std::size_t branch, std::size_t offset) const;

  // Throws Error(kInvalidConfig) naming the first violated invariant.
  void validate() const;

 private:
  std::vector<LayoutEntry> entries_;
  std::vector<std::size_t> title_lens_;
  std::vector<std::size_t> title_offsets_;
  std::size_t block_start_ = 0;
  std::size_t max_title_len_ = 0;
  std::size_t steps_ = 0;
  bool closed_ = false;
};

inline SequenceLayout build_layout(std::size_t prefix_len, std::span<const std::size_t> title_lens) {
  return SequenceLayout::build(prefix_len, title_lens);
}

// Shared position id of every row decoded at body step `step`.
PositionId step_positions(const SequenceLayout& layout, std::size_t step);

}  // namespace treedec
