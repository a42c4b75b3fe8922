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
#include <optional>
#include <string>
#include <vector>

#include "treedec/harness/task_script.hpp"
#include "treedec/pipeline/decode_config.hpp"
#include "treedec/pipeline/pipeline.hpp"

namespace treedec {

// One generated suite. Task i uses seed `seed + i`.
struct SuiteSpec {
  std::string suite;  // retrieval | multidoc | planning | single-branch | two-block
  std::size_t count = 100;
  std::uint64_t seed = 0;
  std::size_t n = 10;  // branches; planning draws its own when 0
  std::size_t body_min = 15;
  std::size_t body_max = 25;
};

struct BenchConfig {
  std::vector<SuiteSpec> suites;
  DecodeConfig decode;
  bool include_timing = true;
  std::size_t threads = 1;
};

// Three suites of 100 tasks each: retrieval and multidoc with 10 branches,
// planning with 2 + Binomial(8, 0.3) aspects.
BenchConfig default_bench_config();

// JSON: {"suites": [SuiteSpec fields...], "decode": {DecodeConfig fields},
// "include_timing": bool, "threads": int}. Missing keys keep defaults.
BenchConfig parse_bench_config(const std::string& json_text);
BenchConfig load_bench_config(const std::string& path);

TaskScript make_task(const SuiteSpec& spec, std::size_t index);
std::vector<TaskScript> build_suite(const SuiteSpec& spec);

// Forward passes each mode needs for `task` on a prefix-local script.
std::size_t analytic_normal_passes(const TaskScript& task);
std::size_t analytic_parallel_passes(const TaskScript& task);
double analytic_speedup(const TaskScript& task);

struct ModeResult {
  std::size_t tokens_emitted = 0;  // answer tokens, EOS included
  std::size_t forward_passes = 0;
  std::size_t decode_passes = 0;
  std::size_t prefill_passes = 0;
  double wall_ms = 0.0;
  double tokens_per_pass = 0.0;
  std::optional<bool> correct;  // exact match; unset when the task has no answer
  bool structure_ok = false;    // every required phrase present
  std::string answer;           // extracted answer or empty
  std::size_t blocks = 0;
  std::string error;            // pipeline error, empty on success
};

struct TaskResult {
  std::string suite;
  std::uint64_t seed = 0;
  std::size_t n_branches = 0;
  double analytic_speedup = 0.0;
  ModeResult normal;
  ModeResult parallel;
  double speedup = 0.0;  // parallel tokens/pass over normal tokens/pass
  std::size_t position_law_violations = 0;
  bool answers_match = false;  // final texts identical across modes
};

struct SuiteSummary {
  std::string suite;
  std::size_t tasks = 0;
  std::size_t errors = 0;
  double normal_tokens_per_pass = 0.0;
  double parallel_tokens_per_pass = 0.0;
  double normal_wall_ms = 0.0;
  double parallel_wall_ms = 0.0;
  double mean_speedup = 0.0;
  double mean_analytic_speedup = 0.0;
  double max_relative_gap = 0.0;  // max |speedup / analytic - 1|
  std::optional<double> normal_quality;  // accuracy or structural pass rate
  std::optional<double> parallel_quality;
  std::size_t position_law_violations = 0;
  std::size_t mode_mismatches = 0;
};

struct BenchReport {
  std::vector<TaskResult> tasks;
  std::vector<SuiteSummary> suites;
  bool include_timing = true;

  std::string to_json() const;
  // Task,Method,Answer Quality,Tokens/Pass,Time (ms)
  std::string to_csv() const;
};

ModeResult run_task_mode(const TaskScript& task, DecodeMode mode, const DecodeConfig& decode,
                         DecodeTrace* trace_out = nullptr);
TaskResult run_task(const TaskScript& task, const DecodeConfig& decode);

// Runs every task of every suite in both modes. Tasks may run on several
// threads; aggregation happens afterwards in input order, so the report is
// independent of scheduling.
BenchReport run_bench(const BenchConfig& config);
BenchReport run_bench(const std::vector<TaskScript>& tasks, const BenchConfig& config);

SuiteSummary summarize(const std::string& suite, const std::vector<TaskResult>& tasks);

}  // namespace treedec
