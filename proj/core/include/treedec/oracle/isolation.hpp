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

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "treedec/model/forward_engine.hpp"
#include "treedec/model/model_config.hpp"

namespace treedec::oracle {

// One branch decoded alone: a fresh cache holds only the prefix and this
// branch's header, and body step t is fed at prefix_len + max_header_len + t.
struct IsolatedBranch {
  TokenSeq body;
  std::vector<std::vector<float>> step_logits;  // one row per emitted token
};

IsolatedBranch isolated_branch_decode(const ForwardEngine& engine, std::span<const TokenId> prefix,
                                      const TokenSeq& header, std::size_t max_header_len,
                                      std::size_t max_steps);

struct IsolationReport {
  std::size_t branches = 0;
  std::size_t steps_compared = 0;
  std::size_t token_mismatches = 0;  // bodies that differ in any token or length
  float max_abs_diff = 0.0f;

  bool ok(float tolerance = 1e-4f) const { return token_mismatches == 0 && max_abs_diff <= tolerance; }
};

// Runs stage 2 on `prefix` with the given titles and compares every branch
// against its isolated decode.
IsolationReport check_branch_isolation(const ForwardEngine& engine, std::span<const TokenId> prefix,
                                       const std::vector<TokenSeq>& titles, std::size_t max_steps);

struct IsolationCase {
  ModelConfig config;
  TokenSeq prefix;
  std::vector<TokenSeq> titles;
  std::size_t max_steps = 0;
};

// Up to 4 layers, 4 heads, head_dim 16, 8 branches, 6-byte titles and 32
// body steps.
IsolationCase random_isolation_case(std::mt19937_64& rng);

}  // namespace treedec::oracle
