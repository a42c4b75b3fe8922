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

#include <random>

#include "treedec/layout/sequence_layout.hpp"
#include "treedec/layout/tree_mask.hpp"

namespace treedec::oracle {

// Visibility decided pairwise from the two slots' roles alone.
bool brute_force_visible(const SequenceLayout& layout, CacheIndex query, CacheIndex key);

// Number of (query, key) cells where `mask` disagrees with the brute force.
std::size_t mask_mismatches(const SequenceLayout& layout, const TreeMask& mask);

struct LayoutLimits {
  std::size_t max_prefix = 12;
  std::size_t max_branches = 8;
  std::size_t max_title = 6;
  std::size_t max_steps = 8;
  std::size_t max_continuation = 4;
};

// Random block: prefix, titles, steps with random pads (a branch stays padded
// once it finished), then continuation slots.
SequenceLayout random_layout(std::mt19937_64& rng, const LayoutLimits& limits = {});

}  // namespace treedec::oracle
