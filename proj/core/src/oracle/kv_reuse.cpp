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

#include "treedec/oracle/kv_reuse.hpp"

#include "treedec/harness/script_engine.hpp"
#include "treedec/harness/tasks.hpp"
#include "treedec/model/scripted_engine.hpp"
#include "treedec/oracle/invariants.hpp"
#include "treedec/pipeline/pipeline.hpp"

namespace treedec::oracle {

KvReuseReport check_kv_reuse(const ForwardEngine& backbone, const TaskScript& task,
                             const DecodeConfig& config) {
  GuidedEngine engine(backbone, answer_script(task));
  PrefixStabilityObserver observer;
  const PipelineResult r = run_pipeline(engine, task.task_text, config, &observer);
  KvReuseReport report;
  report.blocks = r.trace.blocks;
  report.checks = observer.checks();
  report.violations = observer.violations();
  report.answer_matches = r.answer == task.canonical_answer();
  return report;
}

TaskScript random_kv_task(std::uint64_t seed) {
  if (seed % 4 == 3) return gen_two_block_task(seed);
  return gen_retrieval_task(2 + seed % 4, seed, {12, 16});
}

}  // namespace treedec::oracle
