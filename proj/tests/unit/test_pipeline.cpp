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

#include <nlohmann/json.hpp>

#include <random>

#include "test_util.hpp"
#include "treedec/harness/script_engine.hpp"
#include "treedec/harness/tasks.hpp"
#include "treedec/model/transformer.hpp"
#include "treedec/oracle/invariants.hpp"
#include "treedec/oracle/isolation.hpp"
#include "treedec/oracle/kv_reuse.hpp"
#include "treedec/pipeline/pipeline.hpp"
#include "treedec/skeleton/prompt.hpp"
#include "treedec/skeleton/vocabulary.hpp"

namespace treedec {
namespace {

TaskScript hand_task(std::vector<std::string> titles, std::vector<std::string> bodies,
                     std::string conclusion = "\nDone.") {
  TaskScript t;
  t.suite = "hand";
  t.task_text = "Look at each item.";
  t.texts = {"Items:", conclusion};
  t.blocks = {ScriptBlock{std::move(titles), std::move(bodies)}};
  t.rules = {ConclusionRule{}};
  t.validate();
  return t;
}

std::string repeat_to(char c, std::size_t n) { return std::string(n, c); }

TEST(Pipeline, FourEqualBodiesTakeTwentySixStageTwoPasses) {
  const auto task = hand_task({"w", "x", "y", "z"},
                              {repeat_to('a', 25), repeat_to('b', 25), repeat_to('c', 25), repeat_to('d', 25)});
  const auto engine = scripted_engine(task);
  const auto r = run_pipeline(*engine, task.task_text, DecodeConfig{});
  ASSERT_EQ(r.trace.block_records.size(), 1u);
  const auto& rec = r.trace.block_records[0];
  EXPECT_EQ(rec.stage2_passes, 26u);
  EXPECT_EQ(r.trace.at(Stage::kParallel).forward_passes, 26u);
  EXPECT_EQ(r.trace.at(Stage::kParallel).prefill_passes, 1u);
  std::size_t body_tokens = 0;
  for (auto l : rec.body_lengths) body_tokens += l;
  EXPECT_EQ(body_tokens, 100u);
  EXPECT_EQ(r.answer, task.canonical_answer());
}

TEST(Pipeline, FinalTextIsPreambleBlockAndConclusion) {
  const auto task = gen_retrieval_task(10, 7);
  const auto engine = scripted_engine(task);
  const auto r = run_pipeline(*engine, task.task_text, DecodeConfig{});
  EXPECT_EQ(r.final_text, vocab::decode(task.canonical_answer()));
  EXPECT_EQ(r.final_text.rfind("Check each GPA.####", 0), 0u);
  EXPECT_NE(r.final_text.find("####%%%%\nName: " + *task.expected_answer), std::string::npos);
  EXPECT_EQ(r.trace.blocks, 1u);
  EXPECT_FALSE(r.trace.fallback);
  EXPECT_EQ(oracle::position_law_violations(r.trace), 0u);
}

TEST(Pipeline, SkeletonHasOneTitlePerStudent) {
  const auto task = gen_retrieval_task(10, 11);
  const auto engine = scripted_engine(task);
  DecodeSession session(*engine, DecodeConfig{});
  const auto s1 = run_stage1(session, stage1_prompt(task.task_text));
  ASSERT_EQ(s1.skeleton.n_branches(), 10u);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(vocab::decode(s1.skeleton.titles[i]), task.blocks[0].titles[i]);
  EXPECT_EQ(s1.stop, SkeletonStop::kTerm);
  // Every title step in the transcript is MARK title COLON ELLIPSIS.
  std::size_t ellipses = 0;
  for (std::size_t i = 0; i + 1 < s1.transcript.size(); ++i) {
    if (s1.transcript[i] == vocab::kColon) {
      EXPECT_EQ(s1.transcript[i + 1], vocab::kEllipsis);
      ++ellipses;
    }
  }
  EXPECT_EQ(ellipses, 10u);
}

TEST(Pipeline, ZeroLengthBodiesStillComplete) {
  const auto task = hand_task({"p", "q", "r"}, {"", "", ""});
  const auto engine = scripted_engine(task);
  const auto r = run_pipeline(*engine, task.task_text, DecodeConfig{});
  EXPECT_EQ(r.final_text, "Items:####p:####q:####r:####%%%%\nDone.");
  EXPECT_EQ(r.trace.block_records[0].stage2_passes, 1u);
}

TEST(Pipeline, MarkInContinuationLoopsBack) {
  const auto task = gen_two_block_task(5);
  const auto engine = scripted_engine(task);
  const auto r = run_pipeline(*engine, task.task_text, DecodeConfig{});
  EXPECT_EQ(r.trace.blocks, 2u);
  EXPECT_EQ(r.trace.block_records.size(), 2u);
  EXPECT_EQ(r.answer, task.canonical_answer());
  EXPECT_TRUE(answer_correct(task, r.final_text));
  EXPECT_EQ(oracle::position_law_violations(r.trace), 0u);
}

TEST(Pipeline, NoMarkFallsBackToPlainDecoding) {
  const std::string task = "Say hi.";
  const std::size_t p = stage1_prompt(task).size();
  const TokenSeq reply = vocab::encode("Hi there: no steps needed.");
  ScriptedEngine engine([&](std::span<const TokenId> visible) -> std::optional<TokenId> {
    if (visible.size() < p) return TokenId{' '};  // prompt rows: value unused
    const std::size_t k = visible.size() - p;
    return k < reply.size() ? reply[k] : vocab::kEos;
  });
  const auto par = run_pipeline(engine, task, DecodeConfig{});
  const auto normal = run_normal(engine, task, DecodeConfig{});
  EXPECT_TRUE(par.trace.fallback);
  EXPECT_EQ(par.trace.blocks, 0u);
  EXPECT_EQ(par.answer, normal.answer);
  EXPECT_EQ(par.trace.total_forward_passes(), normal.trace.total_forward_passes());
}

TEST(Pipeline, SingleBranchEqualsPlainCausalDecoding) {
  ModelConfig c;
  c.n_layers = 2;
  c.n_heads = 2;
  c.head_dim = 8;
  c.hidden_dim = 16;
  c.seed = 17;
  const auto model = init_model(c);
  const TokenSeq prefix = vocab::encode("context ");
  const TokenSeq title = vocab::encode("Topic");

  DecodeConfig config;
  config.max_steps_per_branch = 20;
  DecodeSession session(*model, config);
  session.feed(prefix, Stage::kSkeleton);
  Skeleton sk;
  sk.titles = {title};
  const ParallelBlock block = run_stage2(session, sk);

  // Plain greedy continuation of prefix + header, one token at a time.
  DecodeSession plain(*model, config);
  TokenSeq seq = prefix;
  const TokenSeq header = branch_header(title);
  seq.insert(seq.end(), header.begin(), header.end());
  auto logits = plain.feed(seq, Stage::kNormal);
  TokenSeq body;
  while (body.size() < config.max_steps_per_branch) {
    const TokenId t = argmax(logits);
    if (t == vocab::kMark || t == vocab::kTerm || t == vocab::kEos || t == vocab::kPad) break;
    body.push_back(t);
    const TokenId one[] = {t};
    logits = plain.feed(one, Stage::kNormal);
  }
  EXPECT_EQ(block.bodies[0], body);
}

TEST(Pipeline, BranchesMatchIsolatedDecodes) {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 8; ++i) {
    const auto c = oracle::random_isolation_case(rng);
    const auto model = init_model(c.config);
    const auto r = oracle::check_branch_isolation(*model, c.prefix, c.titles, c.max_steps);
    EXPECT_EQ(r.token_mismatches, 0u) << "case " << i;
    EXPECT_LE(r.max_abs_diff, 1e-4f) << "case " << i;
    EXPECT_GT(r.steps_compared, 0u);
  }
}

TEST(Pipeline, LongBodiesAreCappedPerBranch) {
  const auto task = hand_task({"a", "b"}, {repeat_to('x', 30), "short"});
  const auto engine = scripted_engine(task);
  DecodeConfig config;
  config.max_steps_per_branch = 10;
  DecodeSession session(*engine, config);
  const auto s1 = run_stage1(session, stage1_prompt(task.task_text));
  truncate_cache(session.cache(), s1.block_start);
  const auto block = run_stage2(session, s1.skeleton);
  EXPECT_EQ(block.status[0], BranchStatus::kCapped);
  EXPECT_EQ(block.bodies[0].size(), 10u);
  EXPECT_EQ(block.status[1], BranchStatus::kTerminated);
  EXPECT_EQ(vocab::decode(block.bodies[1]), "short");
  EXPECT_EQ(block.passes, 10u);
}

TEST(Pipeline, UnclosedSkeletonHitsCap) {
  const std::string task = "Go.";
  const std::size_t p = stage1_prompt(task).size();
  // Opens a block and never closes its title.
  ScriptedEngine engine([&](std::span<const TokenId> visible) -> std::optional<TokenId> {
    if (visible.size() <= p) return vocab::kMark;
    return TokenId{'z'};
  });
  DecodeConfig config;
  config.max_skeleton_tokens = 16;
  EXPECT_TREEDEC_ERROR(run_pipeline(engine, task, config), ErrorCode::kSkeletonCapExceeded);
}

TEST(Pipeline, EndlessConclusionHitsCap) {
  const auto task = hand_task({"a"}, {"b"}, std::string(40, 'c'));
  const auto engine = scripted_engine(task);
  DecodeConfig config;
  config.max_continuation_tokens = 8;
  EXPECT_TREEDEC_ERROR(run_pipeline(*engine, task.task_text, config), ErrorCode::kContinuationCapExceeded);
  config.cap_is_error = false;
  const auto r = run_pipeline(*engine, task.task_text, config);
  EXPECT_EQ(r.trace.blocks, 1u);
}

TEST(Pipeline, ForcedTokensRespectTheGrammar) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 20; ++i) {
    const auto task = gen_retrieval_task(2 + rng() % 6, rng());
    const auto engine = scripted_engine(task);
    oracle::ForcingObserver obs;
    run_pipeline(*engine, task.task_text, DecodeConfig{}, &obs);
    EXPECT_GT(obs.steps(), 0u);
    EXPECT_EQ(obs.violations(), 0u);
  }
}

TEST(Pipeline, PrefixCacheIsReusedBitwise) {
  ModelConfig c;
  c.n_layers = 1;
  c.n_heads = 2;
  c.head_dim = 4;
  c.hidden_dim = 8;
  const auto model = init_model(c);
  for (std::uint64_t seed : {3u, 7u}) {
    const auto r = oracle::check_kv_reuse(*model, oracle::random_kv_task(seed));
    EXPECT_TRUE(r.answer_matches);
    EXPECT_GT(r.checks, 0u);
    EXPECT_EQ(r.violations, 0u);
  }
}

TEST(Pipeline, NormalModeCountsOnePassPerToken) {
  const auto task = gen_multidoc_task(4, 2);
  const auto engine = scripted_engine(task);
  const auto r = run_normal(*engine, task.task_text, DecodeConfig{});
  EXPECT_EQ(r.answer, task.canonical_answer());
  EXPECT_EQ(r.trace.total_forward_passes(), r.answer.size());
  EXPECT_EQ(r.trace.total_prefill_passes(), 1u);
}

TEST(Pipeline, TraceJsonOmitsTimingOnRequest) {
  const auto task = gen_planning_task(3, 1);
  const auto engine = scripted_engine(task);
  const auto r = run_pipeline(*engine, task.task_text, DecodeConfig{});
  const auto with = nlohmann::json::parse(r.trace.to_json(true));
  const auto without = r.trace.to_json(false);
  EXPECT_EQ(with.at("blocks"), 1);
  EXPECT_TRUE(with.at("stages").contains("parallel"));
  EXPECT_EQ(without.find("wall_ms"), std::string::npos);
  EXPECT_NE(r.trace.to_json(true).find("wall_ms"), std::string::npos);
}

}  // namespace
}  // namespace treedec
