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
#include <cstdio>
#include <filesystem>
#include <random>

#include "test_util.hpp"
#include "treedec/model/kv_cache.hpp"
#include "treedec/model/model_config.hpp"
#include "treedec/model/scripted_engine.hpp"
#include "treedec/model/transformer.hpp"
#include "treedec/model/weights_io.hpp"
#include "treedec/skeleton/vocabulary.hpp"

namespace treedec {
namespace {

ModelConfig small_config(std::uint64_t seed = 3) {
  ModelConfig c;
  c.n_layers = 2;
  c.n_heads = 2;
  c.head_dim = 8;
  c.hidden_dim = 16;
  c.seed = seed;
  return c;
}

ForwardRequest causal_request(const TokenSeq& tokens, std::size_t start) {
  ForwardRequest r;
  r.token_ids = tokens;
  for (std::size_t i = 0; i < tokens.size(); ++i) r.position_ids.push_back(static_cast<PositionId>(start + i));
  r.mask_rows = causal_rows(start, tokens.size());
  return r;
}

std::vector<float> row_of(const Logits& l, std::size_t r) {
  const auto s = l.row(r);
  return {s.begin(), s.end()};
}

TokenSeq random_tokens(std::mt19937_64& rng, std::size_t n) {
  TokenSeq t(n);
  for (auto& x : t) x = static_cast<TokenId>(rng() % 256);
  return t;
}

// ---- configuration -------------------------------------------------------

TEST(ModelConfig, DefaultsAreValid) { EXPECT_NO_THROW(ModelConfig{}.validate()); }

TEST(ModelConfig, HiddenMismatchIsInvalid) {
  ModelConfig c;
  c.hidden_dim = 60;
  EXPECT_TREEDEC_ERROR(c.validate(), ErrorCode::kInvalidConfig);
  EXPECT_TREEDEC_ERROR(init_model(c), ErrorCode::kInvalidConfig);
}

TEST(ModelConfig, OddHeadDimAndSmallVocabAreInvalid) {
  ModelConfig c;
  c.n_heads = 8;
  c.head_dim = 7;
  c.hidden_dim = 56;
  EXPECT_TREEDEC_ERROR(c.validate(), ErrorCode::kInvalidConfig);
  ModelConfig v;
  v.vocab_size = 100;
  EXPECT_TREEDEC_ERROR(v.validate(), ErrorCode::kInvalidConfig);
  ModelConfig z;
  z.n_layers = 0;
  EXPECT_TREEDEC_ERROR(z.validate(), ErrorCode::kInvalidConfig);
}

TEST(ModelConfig, ParsesKeyValueText) {
  const auto c = parse_model_config("# tiny\nn_layers = 3\n n_heads=2 \nhead_dim = 4\nhidden_dim = 8\nseed = 9\n");
  EXPECT_EQ(c.n_layers, 3u);
  EXPECT_EQ(c.n_heads, 2u);
  EXPECT_EQ(c.hidden_dim, 8u);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(parse_model_config(format_model_config(c)), c);
}

TEST(ModelConfig, RejectsUnknownKeysAndBadValues) {
  EXPECT_TREEDEC_ERROR(parse_model_config("layers = 2\n"), ErrorCode::kInvalidConfig);
  EXPECT_TREEDEC_ERROR(parse_model_config("n_layers = two\n"), ErrorCode::kInvalidConfig);
  EXPECT_TREEDEC_ERROR(parse_model_config("n_layers 2\n"), ErrorCode::kInvalidConfig);
}

TEST(ModelConfig, ShippedTinyConfigLoads) {
  const auto c = load_model_config(std::string(TREEDEC_SOURCE_DIR) + "/configs/tiny_model.cfg");
  EXPECT_EQ(c, ModelConfig{});
}

// ---- transformer ---------------------------------------------------------

TEST(Transformer, SameConfigGivesIdenticalLogits) {
  const auto a = init_model(small_config());
  const auto b = init_model(small_config());
  const TokenSeq toks = {'h', 'e', 'l', 'l', 'o'};
  KVCache ca = a->make_cache(), cb = b->make_cache();
  const Logits la = a->forward(causal_request(toks, 0), ca);
  const Logits lb = b->forward(causal_request(toks, 0), cb);
  for (std::size_t r = 0; r < toks.size(); ++r) EXPECT_EQ(row_of(la, r), row_of(lb, r));
}

TEST(Transformer, DifferentSeedsGiveDifferentLogits) {
  const auto a = init_model(small_config(1));
  const auto b = init_model(small_config(2));
  const TokenSeq toks = {'x', 'y'};
  KVCache ca = a->make_cache(), cb = b->make_cache();
  EXPECT_NE(row_of(a->forward(causal_request(toks, 0), ca), 1),
            row_of(b->forward(causal_request(toks, 0), cb), 1));
}

TEST(Transformer, PrefillMatchesStepwiseDecoding) {
  std::mt19937_64 rng(5);
  const auto model = init_model(small_config());
  const TokenSeq toks = random_tokens(rng, 24);
  KVCache full = model->make_cache();
  const Logits all = model->forward(causal_request(toks, 0), full);
  KVCache step = model->make_cache();
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const Logits one = model->forward(causal_request({toks[i]}, i), step);
    EXPECT_EQ(row_of(one, 0), row_of(all, i)) << "row " << i;
  }
  EXPECT_TRUE(full.prefix_equals(step, toks.size()));
}

TEST(Transformer, SelfOnlyRowIgnoresPosition) {
  // A row that sees only itself: rotary phases cancel in q.k, so the output
  // depends on the token alone.
  const auto model = init_model(small_config());
  auto run = [&](PositionId pos) {
    KVCache cache = model->make_cache();
    ForwardRequest r{{'q'}, {pos}, {{0}}};
    return row_of(model->forward(r, cache), 0);
  };
  const auto a = run(0);
  const auto b = run(37);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-5f);
}

TEST(Transformer, MutuallyInvisibleTwinsAreIdentical) {
  const auto model = init_model(small_config());
  KVCache cache = model->make_cache();
  const TokenSeq prefix = {'a', 'b', 'c'};
  model->forward(causal_request(prefix, 0), cache);
  ForwardRequest r;
  r.token_ids = {'z', 'z'};
  r.position_ids = {3, 3};
  r.mask_rows = {{0, 1, 2, 3}, {0, 1, 2, 4}};
  const Logits l = model->forward(r, cache);
  EXPECT_EQ(row_of(l, 0), row_of(l, 1));
}

TEST(Transformer, RejectsBadRequests) {
  const auto model = init_model(small_config());
  KVCache cache = model->make_cache();
  ForwardRequest mismatch{{'a', 'b'}, {0}, {{0}, {0, 1}}};
  EXPECT_TREEDEC_ERROR(model->forward(mismatch, cache), ErrorCode::kLengthMismatch);
  ForwardRequest out_of_range{{'a'}, {0}, {{0, 5}}};
  EXPECT_TREEDEC_ERROR(model->forward(out_of_range, cache), ErrorCode::kMaskOutOfRange);
  ForwardRequest no_self{{'a', 'b'}, {0, 1}, {{0}, {0}}};
  EXPECT_TREEDEC_ERROR(model->forward(no_self, cache), ErrorCode::kMaskOutOfRange);
  ForwardRequest bad_token{{9999}, {0}, {{0}}};
  EXPECT_TREEDEC_ERROR(model->forward(bad_token, cache), ErrorCode::kInvalidToken);
  EXPECT_EQ(cache.size(), 0u);
}

TEST(Transformer, ArgmaxBreaksTiesTowardLowestId) {
  const std::vector<float> v = {0.5f, 2.0f, 2.0f, -1.0f};
  EXPECT_EQ(argmax(v), 1);
}

// ---- cache ---------------------------------------------------------------

TEST(KVCache, TruncateToCurrentLengthIsIdentity) {
  const auto model = init_model(small_config());
  KVCache cache = model->make_cache();
  model->forward(causal_request({'a', 'b', 'c'}, 0), cache);
  const KVCache before = cache;
  cache.truncate(3);
  EXPECT_EQ(cache.size(), 3u);
  EXPECT_TRUE(cache.prefix_equals(before, 3));
}

TEST(KVCache, TruncateToZeroEmpties) {
  const auto model = init_model(small_config());
  KVCache cache = model->make_cache();
  model->forward(causal_request({'a', 'b'}, 0), cache);
  truncate_cache(cache, 0);
  EXPECT_TRUE(cache.empty());
}

TEST(KVCache, TruncateBeyondLengthFails) {
  KVCache cache(1, 4);
  cache.append('a', 0);
  EXPECT_TREEDEC_ERROR(cache.truncate(2), ErrorCode::kLengthExceedsCache);
}

TEST(KVCache, TruncateThenReappendReproducesLogits) {
  std::mt19937_64 rng(11);
  const auto model = init_model(small_config());
  const TokenSeq toks = random_tokens(rng, 10);
  KVCache cache = model->make_cache();
  const Logits original = model->forward(causal_request(toks, 0), cache);
  cache.truncate(6);
  const TokenSeq tail(toks.begin() + 6, toks.end());
  const Logits again = model->forward(causal_request(tail, 6), cache);
  for (std::size_t i = 0; i < tail.size(); ++i) EXPECT_EQ(row_of(again, i), row_of(original, 6 + i));
}

// ---- weights file ---------------------------------------------------------

TEST(WeightsIo, RoundTripPreservesLogits) {
  const auto model = init_model(small_config(21));
  const auto path = std::filesystem::temp_directory_path() / "treedec_weights_roundtrip.bin";
  save_weights(*model, path);
  const auto loaded = load_weights(path);
  std::filesystem::remove(path);
  EXPECT_EQ(loaded->config(), model->config());
  KVCache a = model->make_cache(), b = loaded->make_cache();
  EXPECT_EQ(row_of(model->forward(causal_request({'o', 'k'}, 0), a), 1),
            row_of(loaded->forward(causal_request({'o', 'k'}, 0), b), 1));
}

TEST(WeightsIo, RejectsGarbage) {
  const auto path = std::filesystem::temp_directory_path() / "treedec_weights_garbage.bin";
  {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    std::fputs("not a weights file", f);
    std::fclose(f);
  }
  EXPECT_THROW(load_weights(path), Error);
  std::filesystem::remove(path);
}

// ---- scripted engines ------------------------------------------------------

// Emits the first token after the last MARK it can see, or MARK if none.
std::optional<TokenId> echo_title(std::span<const TokenId> visible) {
  for (std::size_t i = visible.size(); i-- > 0;) {
    if (visible[i] == vocab::kMark) return i + 1 < visible.size() ? visible[i + 1] : vocab::kEos;
  }
  return vocab::kMark;
}

TEST(ScriptedEngine, EmitsScriptChoiceAsOneHot) {
  ScriptedEngine engine(echo_title);
  KVCache cache = engine.make_cache();
  const Logits l = engine.forward(causal_request({'a', 'b'}, 0), cache);
  EXPECT_EQ(argmax(l.row(1)), vocab::kMark);
  EXPECT_EQ(l.row(1)[vocab::kMark], 1.0f);
  EXPECT_EQ(cache.size(), 2u);
}

TEST(ScriptedEngine, RowsFollowTheirOwnVisibleTitles) {
  ScriptedEngine engine(echo_title);
  KVCache cache = engine.make_cache();
  engine.forward(causal_request({'p'}, 0), cache);
  // Two branches: MARK 'x' and MARK 'y', each invisible to the other.
  ForwardRequest r;
  r.token_ids = {vocab::kMark, 'x', vocab::kMark, 'y'};
  r.position_ids = {1, 2, 1, 2};
  r.mask_rows = {{0, 1}, {0, 1, 2}, {0, 3}, {0, 3, 4}};
  const Logits l = engine.forward(r, cache);
  EXPECT_EQ(argmax(l.row(1)), 'x');
  EXPECT_EQ(argmax(l.row(3)), 'y');
  EXPECT_NE(argmax(l.row(1)), argmax(l.row(3)));
}

TEST(ScriptedEngine, HiddenTokenIsAbsentFromTheScriptInput) {
  ScriptedEngine engine(echo_title);
  KVCache cache = engine.make_cache();
  ForwardRequest r;
  r.token_ids = {vocab::kMark, 'x', 'q'};
  r.position_ids = {0, 1, 2};
  // Row 2 cannot see the MARK, so the script answers as if none exists.
  r.mask_rows = {{0}, {0, 1}, {1, 2}};
  const Logits l = engine.forward(r, cache);
  EXPECT_EQ(argmax(l.row(1)), 'x');
  EXPECT_EQ(argmax(l.row(2)), vocab::kMark);
}

TEST(ScriptedEngine, UndefinedContinuationIsAnError) {
  ScriptedEngine engine([](std::span<const TokenId>) -> std::optional<TokenId> { return std::nullopt; });
  KVCache cache = engine.make_cache();
  EXPECT_TREEDEC_ERROR(engine.forward(causal_request({'a'}, 0), cache),
                       ErrorCode::kScriptUndefinedContinuation);
}

TEST(GuidedEngine, FillsRealCacheButFollowsScript) {
  const auto model = init_model(small_config());
  GuidedEngine engine(*model, echo_title);
  KVCache guided = engine.make_cache();
  KVCache plain = model->make_cache();
  const TokenSeq toks = {'a', vocab::kMark, 'k'};
  const Logits l = engine.forward(causal_request(toks, 0), guided);
  model->forward(causal_request(toks, 0), plain);
  EXPECT_EQ(argmax(l.row(2)), 'k');
  EXPECT_TRUE(guided.prefix_equals(plain, 3));
}

}  // namespace
}  // namespace treedec
