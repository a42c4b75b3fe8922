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

#include <random>
#include <string>

#include "treedec/skeleton/vocabulary.hpp"

namespace treedec {
namespace {

using namespace vocab;

TEST(Vocabulary, PlainBytesMapToThemselves) {
  const auto t = encode("ab\n");
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0], 'a');
  EXPECT_EQ(t[1], 'b');
  EXPECT_EQ(t[2], '\n');
}

TEST(Vocabulary, SpecialsMatchGreedily) {
  EXPECT_EQ(encode("####"), (TokenSeq{kMark}));
  EXPECT_EQ(encode("%%%%"), (TokenSeq{kTerm}));
  EXPECT_EQ(encode("......"), (TokenSeq{kEllipsis}));
  EXPECT_EQ(encode(":"), (TokenSeq{kColon}));
  EXPECT_EQ(encode("#####"), (TokenSeq{kMark, '#'}));
  EXPECT_EQ(encode("......."), (TokenSeq{kEllipsis, '.'}));
  EXPECT_EQ(encode("....."), (TokenSeq{'.', '.', '.', '.', '.'}));
  EXPECT_EQ(encode("###"), (TokenSeq{'#', '#', '#'}));
  EXPECT_EQ(encode("####A: ......####%%%%"),
            (TokenSeq{kMark, 'A', kColon, ' ', kEllipsis, kMark, kTerm}));
}

TEST(Vocabulary, PadAndEosHaveNoSurfaceForm) {
  const TokenSeq t = {'h', kPad, 'i', kEos};
  EXPECT_EQ(decode(t), "hi");
  EXPECT_EQ(describe(t), "h<pad>i<eos>");
}

TEST(Vocabulary, RoundTripRandomByteStrings) {
  std::mt19937_64 rng(42);
  const std::string alphabet = "#%.:ab \n";
  for (int trial = 0; trial < 2000; ++trial) {
    std::string s;
    const std::size_t len = rng() % 40;
    for (std::size_t i = 0; i < len; ++i) {
      // Mix a control-heavy alphabet with arbitrary bytes.
      s.push_back(rng() % 3 == 0 ? static_cast<char>(rng() % 256) : alphabet[rng() % alphabet.size()]);
    }
    EXPECT_EQ(decode(encode(s)), s);
  }
}

TEST(Vocabulary, Predicates) {
  EXPECT_TRUE(is_byte(0));
  EXPECT_TRUE(is_byte(255));
  EXPECT_FALSE(is_byte(kMark));
  EXPECT_TRUE(is_special(kEos));
  EXPECT_FALSE(is_valid(kSize));
  EXPECT_FALSE(is_valid(-1));
}

}  // namespace
}  // namespace treedec
