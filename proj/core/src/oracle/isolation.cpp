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

#include "treedec/oracle/isolation.hpp"

#include <algorithm>
#include <cmath>

#include "treedec/pipeline/pipeline.hpp"
#include "treedec/skeleton/skeleton.hpp"
#include "treedec/skeleton/vocabulary.hpp"

namespace treedec::oracle {
namespace {

bool stops_branch(TokenId t) {
  return t == vocab::kMark || t == vocab::kTerm || t == vocab::kEos || t == vocab::kPad;
}

std::vector<float> run_causal(const ForwardEngine& engine, KVCache& cache,
                              std::span<const TokenId> tokens, PositionId first_position) {
  ForwardRequest req;
  const std::size_t start = cache.size();
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    req.token_ids.push_back(tokens[i]);
    req.position_ids.push_back(first_position + static_cast<PositionId>(i));
    std::vector<CacheIndex> row(start + i + 1);
    for (std::size_t k = 0; k < row.size(); ++k) row[k] = static_cast<CacheIndex>(k);
    req.mask_rows.push_back(std::move(row));
  }
  const Logits out = engine.forward(req, cache);
  const auto last = out.row(out.rows() - 1);
  return {last.begin(), last.end()};
}

class BranchRecorder : public PipelineObserver {
 public:
  explicit BranchRecorder(std::size_t n) : logits(n) {}
  void on_branch_token(std::size_t, std::size_t branch, std::size_t step,
                       std::span<const float> row, TokenId) override {
    auto& rows = logits[branch];
    if (rows.size() <= step) rows.resize(step + 1);
    rows[step].assign(row.begin(), row.end());
  }
  std::vector<std::vector<std::vector<float>>> logits;
};

}  // namespace

IsolatedBranch isolated_branch_decode(const ForwardEngine& engine, std::span<const TokenId> prefix,
                                      const TokenSeq& header, std::size_t max_header_len,
                                      std::size_t max_steps) {
  KVCache cache = engine.make_cache();
  IsolatedBranch out;
  const auto p = static_cast<PositionId>(prefix.size());
  if (!prefix.empty()) run_causal(engine, cache, prefix, 0);
  std::vector<float> logits = run_causal(engine, cache, header, p);
  for (std::size_t t = 0;; ++t) {
    const TokenId next = argmax(logits);
    out.step_logits.push_back(logits);
    if (stops_branch(next)) break;
    out.body.push_back(next);
    if (out.body.size() >= max_steps) break;
    const TokenId one[] = {next};
    logits = run_causal(engine, cache, one, p + static_cast<PositionId>(max_header_len + t));
  }
  return out;
}

IsolationReport check_branch_isolation(const ForwardEngine& engine, std::span<const TokenId> prefix,
                                       const std::vector<TokenSeq>& titles, std::size_t max_steps) {
  DecodeConfig config;
  config.max_steps_per_branch = max_steps;
  BranchRecorder recorder(titles.size());
  DecodeSession session(engine, config, &recorder);
  if (!prefix.empty()) session.feed(prefix, Stage::kSkeleton);
  Skeleton skeleton;
  skeleton.titles = titles;
  skeleton.terminated = true;
  const ParallelBlock block = run_stage2(session, skeleton);

  std::size_t max_header = 0;
  for (const auto& t : titles) max_header = std::max(max_header, branch_header(t).size());

  IsolationReport report;
  report.branches = titles.size();
  for (std::size_t b = 0; b < titles.size(); ++b) {
    const IsolatedBranch iso =
        isolated_branch_decode(engine, prefix, branch_header(titles[b]), max_header, max_steps);
    if (iso.body != block.bodies[b] || iso.step_logits.size() != recorder.logits[b].size()) {
      ++report.token_mismatches;
    }
    const std::size_t steps = std::min(iso.step_logits.size(), recorder.logits[b].size());
    for (std::size_t t = 0; t < steps; ++t) {
      const auto& a = iso.step_logits[t];
      const auto& c = recorder.logits[b][t];
      if (a.size() != c.size()) {
        ++report.token_mismatches;
        continue;
      }
      for (std::size_t v = 0; v < a.size(); ++v) {
        report.max_abs_diff = std::max(report.max_abs_diff, std::fabs(a[v] - c[v]));
      }
      ++report.steps_compared;
    }
  }
  return report;
}

IsolationCase random_isolation_case(std::mt19937_64& rng) {
  auto between = [&](std::size_t lo, std::size_t hi) { return lo + rng() % (hi - lo + 1); };
  IsolationCase c;
  c.config.n_layers = between(1, 4);
  c.config.n_heads = between(1, 4);
  c.config.head_dim = 2 * between(1, 8);
  c.config.hidden_dim = c.config.n_heads * c.config.head_dim;
  c.config.seed = rng();
  c.prefix.resize(between(1, 24));
  for (auto& t : c.prefix) t = static_cast<TokenId>(rng() % 256);
  c.titles.resize(between(1, 8));
  for (auto& title : c.titles) {
    title.resize(between(1, 6));
    for (auto& t : title) t = static_cast<TokenId>(rng() % 256);
  }
  c.max_steps = between(1, 32);
  return c;
}

}  // namespace treedec::oracle
