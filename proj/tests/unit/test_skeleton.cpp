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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "test_util.hpp"
#include "treedec/skeleton/forcing.hpp"
#include "treedec/skeleton/prompt.hpp"
#include "treedec/skeleton/skeleton.hpp"
#include "treedec/skeleton/vocabulary.hpp"

namespace treedec {
namespace {

using vocab::encode;

std::vector<float> random_logits(std::mt19937_64& rng) {
  std::normal_distribution<float> d(0.0f, 3.0f);
  std::vector<float> v(vocab::kSize);
  for (auto& x : v) x = d(rng);
  return v;
}

// ---- forcing --------------------------------------------------------------

TEST(Forcing, AfterColonOnlyEllipsis) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const auto c = apply_forcing({ForcingPhase::kAfterColonInTitle}, random_logits(rng));
    EXPECT_EQ(c.token, vocab::kEllipsis);
    EXPECT_EQ(c.next.phase, ForcingPhase::kAfterEllipsis);
  }
}

TEST(Forcing, AfterEllipsisOnlyMarkOrTerm) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    const auto c = apply_forcing({ForcingPhase::kAfterEllipsis}, random_logits(rng));
    EXPECT_TRUE(c.token == vocab::kMark || c.token == vocab::kTerm);
  }
}

TEST(Forcing, FreePhaseLeavesLogitsUntouched) {
  std::mt19937_64 rng(3);
  const auto logits = random_logits(rng);
  const auto c = apply_forcing({}, logits);
  EXPECT_EQ(c.logits, logits);
}

TEST(Forcing, TitlePhasesKeepStepsWellFormed) {
  const ForcingState block{ForcingPhase::kBlockOpen};
  EXPECT_TRUE(block.allows('A'));
  EXPECT_FALSE(block.allows(vocab::kTerm));
  EXPECT_EQ(ForcingState{}.advance(vocab::kMark).phase, ForcingPhase::kBlockOpen);
  const ForcingState open{ForcingPhase::kTitleOpen};
  EXPECT_TRUE(open.allows('A'));
  EXPECT_TRUE(open.allows(vocab::kTerm));
  EXPECT_FALSE(open.allows(vocab::kColon));
  EXPECT_FALSE(open.allows(vocab::kEos));
  const ForcingState in{ForcingPhase::kInTitle};
  EXPECT_TRUE(in.allows(vocab::kColon));
  EXPECT_FALSE(in.allows(vocab::kMark));
  EXPECT_FALSE(in.allows(vocab::kEllipsis));
}

TEST(Forcing, AutomatonWalksASkeleton) {
  ForcingState s;
  for (TokenId t : encode("Intro####A:......####%%%%")) {
    ASSERT_TRUE(s.allows(t)) << "token " << t << " in " << phase_name(s.phase);
    s = s.advance(t);
  }
  EXPECT_EQ(s.phase, ForcingPhase::kFree);
}

TEST(Forcing, MaskedEntriesAreNegativeInfinity) {
  std::vector<float> v(vocab::kSize, 1.0f);
  ForcingState{ForcingPhase::kAfterEllipsis}.mask(v);
  for (TokenId t = 0; t < vocab::kSize; ++t) {
    if (t == vocab::kMark || t == vocab::kTerm) {
      EXPECT_EQ(v[t], 1.0f);
    } else {
      EXPECT_TRUE(std::isinf(v[t]) && v[t] < 0);
    }
  }
}

// ---- parsing --------------------------------------------------------------

TEST(Skeleton, ParsesTwoDocuments) {
  const auto s = parse_skeleton(encode("Let us analyze. ####Doc 1:......####Doc 2:......####%%%%"));
  ASSERT_EQ(s.n_branches(), 2u);
  EXPECT_EQ(vocab::decode(s.titles[0]), "Doc 1");
  EXPECT_EQ(vocab::decode(s.titles[1]), "Doc 2");
  EXPECT_EQ(vocab::decode(s.preamble), "Let us analyze. ");
  EXPECT_EQ(s.block_start, 16u);
  EXPECT_TRUE(s.terminated);
}

TEST(Skeleton, TenStudentsCountedByStringScan) {
  const char* names[] = {"Ava Reed", "Ben Ortiz", "Chen Wu", "Dara Singh", "Emil Novak",
                         "Farah Aziz", "Gil Moreno", "Hana Ito", "Ivo Petrov", "Jade Kim"};
  std::string text = "Check each GPA against the range.";
  for (const char* n : names) text += std::string("####") + n + ":......";
  text += "####%%%%";
  // Independent count: marks in the raw string minus the closing one.
  std::size_t marks = 0;
  for (std::size_t at = text.find("####"); at != std::string::npos; at = text.find("####", at + 4)) ++marks;
  const auto s = parse_skeleton(encode(text));
  EXPECT_EQ(s.n_branches(), marks - 1);
  ASSERT_EQ(s.n_branches(), 10u);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(vocab::decode(s.titles[i]), names[i]);
}

TEST(Skeleton, NoMarkIsAnError) {
  EXPECT_TREEDEC_ERROR(parse_skeleton(encode("just an answer")), ErrorCode::kNoMarkFound);
  EXPECT_TREEDEC_ERROR(parse_skeleton(encode("done%%%%")), ErrorCode::kNoMarkFound);
}

TEST(Skeleton, MalformedStepsAreErrors) {
  EXPECT_TREEDEC_ERROR(parse_skeleton(encode("####:......####%%%%")), ErrorCode::kMalformedBranch);
  EXPECT_TREEDEC_ERROR(parse_skeleton(encode("####A####%%%%")), ErrorCode::kMalformedBranch);
  EXPECT_TREEDEC_ERROR(parse_skeleton(encode("####%%%%")), ErrorCode::kMalformedBranch);
}

TEST(Skeleton, AcceptsWrittenBodiesAndTermAfterEllipsis) {
  const auto full = parse_skeleton(encode("####A: body text####B:more####%%%%"));
  ASSERT_EQ(full.n_branches(), 2u);
  EXPECT_EQ(vocab::decode(full.titles[1]), "B");
  const auto short_close = parse_skeleton(encode("####A:......%%%%"));
  EXPECT_EQ(short_close.n_branches(), 1u);
  EXPECT_TRUE(short_close.terminated);
}

TEST(Skeleton, DropsIncompleteTrailingStep) {
  const auto s = parse_skeleton(encode("####A:......####B:......####C"));
  EXPECT_EQ(s.n_branches(), 2u);
  EXPECT_FALSE(s.terminated);
}

TEST(Skeleton, RenderThenParseIsIdentity) {
  std::mt19937_64 rng(9);
  const std::string letters = "abcdefghij XYZ0123";
  for (int trial = 0; trial < 300; ++trial) {
    std::string pre;
    for (std::size_t i = rng() % 12; i > 0; --i) pre.push_back(letters[rng() % letters.size()]);
    std::vector<std::string> titles(1 + rng() % 8);
    std::string text = pre;
    for (auto& t : titles) {
      for (std::size_t i = 1 + rng() % 6; i > 0; --i) t.push_back(letters[rng() % letters.size()]);
      text += "####" + t + ":......";
    }
    text += "####%%%%";
    const auto s = parse_skeleton(encode(text));
    EXPECT_EQ(vocab::decode(s.preamble), pre);
    ASSERT_EQ(s.n_branches(), titles.size());
    for (std::size_t i = 0; i < titles.size(); ++i) EXPECT_EQ(vocab::decode(s.titles[i]), titles[i]);
  }
}

TEST(Skeleton, BranchHeaderWrapsTitle) {
  EXPECT_EQ(branch_header(encode("Ann")), (TokenSeq{vocab::kMark, 'A', 'n', 'n', vocab::kColon}));
}

TEST(Skeleton, JsonNamesFields) {
  const auto json = parse_skeleton(encode("p####T:......####%%%%")).to_json();
  EXPECT_NE(json.find("\"titles\""), std::string::npos);
  EXPECT_NE(json.find("\"T\""), std::string::npos);
}

// Untrained models emit arbitrary bytes; JSON output must not throw on them.
TEST(Skeleton, JsonToleratesInvalidUtf8) {
  TokenSeq ids = encode("p####");
  ids.push_back(0xA1);
  const TokenSeq tail = encode(":......####%%%%");
  ids.insert(ids.end(), tail.begin(), tail.end());
  std::string json;
  EXPECT_NO_THROW(json = parse_skeleton(ids).to_json());
  EXPECT_NE(json.find("\"titles\""), std::string::npos);
}

// ---- prompt ---------------------------------------------------------------

TEST(Prompt, EndsWithTheInstructionBlock) {
  const auto p = stage1_prompt("analyze A,B");
  const std::string text = vocab::decode(p);
  const std::string instruction(stage1_instruction());
  ASSERT_GE(text.size(), instruction.size());
  EXPECT_EQ(text.substr(text.size() - instruction.size()), instruction);
  EXPECT_EQ(text.rfind("analyze A,B\n\n", 0), 0u);
}

TEST(Prompt, InstructionNamesTheMarkers) {
  const std::string instruction(stage1_instruction());
  EXPECT_NE(instruction.find("####"), std::string::npos);
  EXPECT_NE(instruction.find("%%%%"), std::string::npos);
  EXPECT_NE(instruction.find("......"), std::string::npos);
}

TEST(Prompt, RoundTripReproducesSource) {
  const std::string task = "Compare: cost, risk ...... and #### markers";
  EXPECT_EQ(vocab::decode(stage1_prompt(task)), task + "\n\n" + std::string(stage1_instruction()));
}

TEST(Prompt, EmptyInputsAreRejected) {
  EXPECT_TREEDEC_ERROR(stage1_prompt(""), ErrorCode::kInvalidTaskParameter);
  EXPECT_TREEDEC_ERROR(stage1_prompt("x", "  \n"), ErrorCode::kConfiguration);
}

TEST(Prompt, EmptyAssetFileFailsAtLoad) {
  const auto path = std::filesystem::temp_directory_path() / "treedec_empty_instruction.txt";
  { std::ofstream(path) << "\n"; }
  EXPECT_TREEDEC_ERROR(load_instruction(path), ErrorCode::kConfiguration);
  std::filesystem::remove(path);
  EXPECT_TREEDEC_ERROR(load_instruction(path), ErrorCode::kIo);
}

TEST(Prompt, ShippedAssetMatchesEmbeddedText) {
  const auto loaded = load_instruction(std::string(TREEDEC_SOURCE_DIR) + "/core/assets/stage1_instruction.txt");
  EXPECT_EQ(loaded, std::string(stage1_instruction()));
}

}  // namespace
}  // namespace treedec
