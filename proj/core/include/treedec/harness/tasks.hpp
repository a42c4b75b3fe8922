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
#include <string>
#include <vector>

#include "treedec/harness/task_script.hpp"

namespace treedec {

struct RetrievalOptions {
  std::size_t body_min = 15;
  std::size_t body_max = 25;
};

// n student records with distinct GPAs, exactly one inside the asked range.
// n must be in [2, 16].
TaskScript gen_retrieval_task(std::size_t n, std::uint64_t seed, RetrievalOptions options = {});

// n passages, exactly one of which answers the question. n in [2, 16].
TaskScript gen_multidoc_task(std::size_t n, std::uint64_t seed);

// k aspects to analyze then summarize; k in [2, 10]. No exact answer.
TaskScript gen_planning_task(std::size_t k, std::uint64_t seed);

// Aspect count for the planning suite: 2 + Binomial(8, 0.3), mean 4.4.
std::size_t planning_aspect_count(std::uint64_t seed);

// Two consecutive blocks in one answer, exercising loop-back.
TaskScript gen_two_block_task(std::uint64_t seed);

// Single-branch retrieval-shaped task (no parallelism to exploit).
TaskScript gen_single_branch_task(std::uint64_t seed, std::size_t body_len = 20);

}  // namespace treedec
