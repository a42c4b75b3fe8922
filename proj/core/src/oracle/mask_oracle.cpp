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

#include "treedec/oracle/mask_oracle.hpp"

namespace treedec::oracle {

bool brute_force_visible(const SequenceLayout& layout, CacheIndex query, CacheIndex key) {
  if (key == query) return true;
  if (key > query) return false;
  const SegmentKind& q = layout.at(query).kind;
  const SegmentKind& k = layout.at(key).kind;
  switch (k.role) {
    case SegmentRole::kSharedPrefix:
      return true;
    case SegmentRole::kPad:
      return false;
    case SegmentRole::kContinuation:
      return q.role == SegmentRole::kContinuation;
    case SegmentRole::kBranchTitle:
    case SegmentRole::kBranchBody:
      if (q.role == SegmentRole::kContinuation) return true;
      if (q.role == SegmentRole::kSharedPrefix) return false;
      return q.branch == k.branch;
  }
  return false;
}

std::size_t mask_mismatches(const SequenceLayout& layout, const TreeMask& mask) {
  std::size_t bad = 0;
  if (mask.size() != layout.size()) return layout.size() * layout.size() + 1;
  for (CacheIndex q = 0; q < layout.size(); ++q) {
    for (CacheIndex k = 0; k < layout.size(); ++k) {
      if (mask.sees(q, k) != brute_force_visible(layout, q, k)) ++bad;
    }
  }
  return bad;
}

SequenceLayout random_layout(std::mt19937_64& rng, const LayoutLimits& limits) {
  auto upto = [&](std::size_t lo, std::size_t hi) { return lo + rng() % (hi - lo + 1); };
  const std::size_t n = upto(1, limits.max_branches);
  std::vector<std::size_t> titles(n);
  for (auto& t : titles) t = upto(1, limits.max_title);
  SequenceLayout layout = build_layout(upto(0, limits.max_prefix), titles);

  std::vector<bool> done(n, false);
  const std::size_t steps = upto(0, limits.max_steps);
  for (std::size_t s = 0; s < steps; ++s) {
    for (std::size_t b = 0; b < n; ++b) {
      if (!done[b] && rng() % 4 == 0) done[b] = true;
    }
    layout.append_step(done);
  }
  const std::size_t cont = upto(0, limits.max_continuation);
  for (std::size_t i = 0; i < cont; ++i) layout.append_continuation();
  return layout;
}

}  // namespace treedec::oracle
