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

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "test_util.hpp"
#include "treedec/layout/sequence_layout.hpp"
#include "treedec/layout/tree_mask.hpp"
#include "treedec/oracle/mask_oracle.hpp"

namespace treedec {
namespace {

std::vector<PositionId> positions(const SequenceLayout& l) {
  std::vector<PositionId> out;
  for (const auto& e : l.entries()) out.push_back(e.position);
  return out;
}

// Test-local visibility rule written as a table over (query kind, key kind):
// 0 never, 1 always (if earlier), 2 same branch only.
bool reference_sees(const SequenceLayout& l, CacheIndex q, CacheIndex k) {
  if (q == k) return true;
  if (k > q) return false;
  auto cls = [](SegmentRole r) {
    switch (r) {
      case SegmentRole::kSharedPrefix: return 0;
      case SegmentRole::kBranchTitle:
      case SegmentRole::kBranchBody: return 1;
      case SegmentRole::kPad: return 2;
      case SegmentRole::kContinuation: return 3;
    }
    return -1;
  };
  //                        key: prefix branch pad cont
  static const int table[4][4] = {{1, 0, 0, 0},   // query prefix
                                  {1, 2, 0, 0},   // query branch
                                  {1, 2, 0, 0},   // query pad
                                  {1, 1, 0, 1}};  // query continuation
  const auto& qk = l.at(q).kind;
  const auto& kk = l.at(k).kind;
  const int rule = table[cls(qk.role)][cls(kk.role)];
  return rule == 1 || (rule == 2 && qk.branch == kk.branch);
}

TEST(SequenceLayout, SingleBranchIsPlainCausal) {
  const std::size_t titles[] = {3};
  SequenceLayout l = build_layout(5, titles);
  l.append_step({false});
  EXPECT_EQ(positions(l), (std::vector<PositionId>{0, 1, 2, 3, 4, 5, 6, 7, 8}));
  EXPECT_EQ(step_positions(l, 0), 8);
  const TreeMask m = tree_mask(l);
  for (CacheIndex q = 0; q < l.size(); ++q) {
    std::vector<CacheIndex> causal;
    for (CacheIndex k = 0; k <= q; ++k) causal.push_back(k);
    EXPECT_EQ(m.visible[q], causal) << "row " << q;
  }
}

TEST(SequenceLayout, TwoBranchesRestartTitlePositions) {
  const std::size_t titles[] = {2, 4};
  SequenceLayout l = build_layout(3, titles);
  EXPECT_EQ(positions(l), (std::vector<PositionId>{0, 1, 2, 3, 4, 3, 4, 5, 6}));
  const CacheIndex first = l.append_step({false, false});
  EXPECT_EQ(l.at(first).position, 7);
  EXPECT_EQ(l.at(first + 1).position, 7);
  EXPECT_EQ(step_positions(l, 0), 7);
  EXPECT_EQ(step_positions(l, 1), 8);
  EXPECT_EQ(l.title_index(1, 0), 5u);
  EXPECT_NO_THROW(l.validate());
}

TEST(SequenceLayout, MinimalFourBranches) {
  const std::size_t titles[] = {1, 1, 1, 1};
  SequenceLayout l = build_layout(0, titles);
  EXPECT_EQ(positions(l), (std::vector<PositionId>{0, 0, 0, 0}));
  EXPECT_EQ(step_positions(l, 0), 1);
}

TEST(SequenceLayout, RejectsDegenerateInput) {
  EXPECT_TREEDEC_ERROR(build_layout(3, std::vector<std::size_t>{}), ErrorCode::kEmptyBranchSet);
  EXPECT_TREEDEC_ERROR(build_layout(3, std::vector<std::size_t>{2, 0}), ErrorCode::kInvalidConfig);
}

TEST(SequenceLayout, ContinuationFollowsEveryPosition) {
  const std::size_t titles[] = {2, 5};
  SequenceLayout l = build_layout(4, titles);
  l.append_step({false, false});
  l.append_step({true, false});
  const CacheIndex c = l.append_continuation();
  EXPECT_EQ(l.at(c).position, 4 + 5 + 1 + 1);
  EXPECT_THROW(l.append_step({false, false}), std::logic_error);
}

TEST(SequenceLayout, StepPositionsAreConsecutive) {
  const std::size_t titles[] = {3, 1, 2};
  SequenceLayout l = build_layout(6, titles);
  for (std::size_t t = 0; t < 10; ++t) EXPECT_EQ(step_positions(l, t + 1), step_positions(l, t) + 1);
}

TEST(TreeMask, BranchesNeverSeeEachOther) {
  // Prefix plus four branches, several steps: branch-2 queries see nothing
  // of branches 1, 3, 4 (0-based 0, 2, 3).
  const std::size_t titles[] = {2, 3, 2, 4};
  SequenceLayout l = build_layout(5, titles);
  for (int s = 0; s < 4; ++s) l.append_step({false, false, false, false});
  const TreeMask m = tree_mask(l);
  for (const auto& q : l.entries()) {
    if (!q.kind.in_branch() || q.kind.branch != 1) continue;
    for (CacheIndex k : m.visible[q.index]) {
      const auto& kk = l.at(k).kind;
      EXPECT_TRUE(kk.role == SegmentRole::kSharedPrefix || kk.branch == 1)
          << "query " << q.index << " sees " << k;
    }
  }
}

TEST(TreeMask, PadsAreInvisibleToLaterQueries) {
  const std::size_t titles[] = {2, 2};
  SequenceLayout l = build_layout(1, titles);
  l.append_step({false, false});
  const CacheIndex pads = l.append_step({true, false});
  l.append_step({true, false});
  l.append_continuation();
  const TreeMask m = tree_mask(l);
  for (CacheIndex q = pads + 1; q < l.size(); ++q) EXPECT_FALSE(m.sees(q, pads));
}

TEST(TreeMask, MatchesGoldenGrid) {
  const std::size_t titles[] = {2, 4};
  SequenceLayout l = build_layout(3, titles);
  l.append_step({false, false});
  l.append_step({true, false});
  l.append_continuation();
  l.append_continuation();
  std::ifstream in(std::string(TREEDEC_TEST_DATA_DIR) + "/mask_prefix3_titles2_4_steps2_cont2.txt");
  ASSERT_TRUE(in.good());
  std::stringstream golden;
  golden << in.rdbuf();
  EXPECT_EQ(render_mask_grid(tree_mask(l)), golden.str());
}

TEST(TreeMask, RandomLayoutsMatchReferenceAndOracle) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const SequenceLayout l = oracle::random_layout(rng);
    ASSERT_NO_THROW(l.validate());
    const TreeMask m = tree_mask(l);
    for (CacheIndex q = 0; q < l.size(); ++q) {
      for (CacheIndex k = 0; k < l.size(); ++k) {
        ASSERT_EQ(m.sees(q, k), reference_sees(l, q, k)) << "trial " << trial << " q " << q << " k " << k;
        ASSERT_EQ(oracle::brute_force_visible(l, q, k), reference_sees(l, q, k));
      }
    }
  }
}

TEST(TreeMask, LabeledRenderingHasOneLinePerEntry) {
  const std::size_t titles[] = {2, 3};
  SequenceLayout l = build_layout(2, titles);
  l.append_step({false, true});
  const std::string text = render_layout(l, tree_mask(l));
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), l.size());
  EXPECT_NE(text.find("_1.0"), std::string::npos);
}

}  // namespace
}  // namespace treedec
