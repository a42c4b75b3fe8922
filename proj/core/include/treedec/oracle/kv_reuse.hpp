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

#include "treedec/harness/task_script.hpp"
#include "treedec/model/forward_engine.hpp"
#include "treedec/pipeline/decode_config.hpp"

namespace treedec::oracle {

struct KvReuseReport {
  std::size_t blocks = 0;
  std::size_t checks = 0;
  std::size_t violations = 0;
  bool answer_matches = false;  // pipeline answer equals the task's canonical answer
};

// Drives `backbone` through `task`'s scripted answer in parallel mode and
// checks that the shared-prefix K/V entries stay bitwise identical from the
// end of stage 1 through stages 2 and 3 of every block.
KvReuseReport check_kv_reuse(const ForwardEngine& backbone, const TaskScript& task,
                             const DecodeConfig& config = {});

// Small random task (retrieval or two-block, short bodies) for KV checks.
TaskScript random_kv_task(std::uint64_t seed);

}  // namespace treedec::oracle
