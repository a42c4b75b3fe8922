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

#include "treedec/harness/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "treedec/error.hpp"
#include "treedec/harness/script_engine.hpp"
#include "treedec/harness/tasks.hpp"
#include "treedec/oracle/invariants.hpp"
#include "treedec/skeleton/vocabulary.hpp"

namespace treedec {
namespace {

using ojson = nlohmann::ordered_json;

template <typename T>
void read_key(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::string fmt_fixed(double v, int digits) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

ojson mode_json(const ModeResult& m, bool timing) {
  ojson j;
  j["tokens_emitted"] = m.tokens_emitted;
  j["forward_passes"] = m.forward_passes;
  j["decode_passes"] = m.decode_passes;
  j["prefill_passes"] = m.prefill_passes;
  j["tokens_per_pass"] = m.tokens_per_pass;
  if (timing) j["wall_ms"] = m.wall_ms;
  j["blocks"] = m.blocks;
  j["correct"] = m.correct ? ojson(*m.correct) : ojson(nullptr);
  j["structure_ok"] = m.structure_ok;
  j["answer"] = m.answer;
  j["error"] = m.error.empty() ? ojson(nullptr) : ojson(m.error);
  return j;
}

ojson optional_json(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

}  // namespace

BenchConfig default_bench_config() {
  BenchConfig c;
  c.suites = {
      {"retrieval", 100, 1000, 10, 15, 25},
      {"multidoc", 100, 2000, 10, 0, 0},
      {"planning", 100, 3000, 0, 0, 0},
  };
  return c;
}

BenchConfig parse_bench_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfiguration, std::string("bench config: ") + e.what());
  }
  BenchConfig c = default_bench_config();
  try {
    if (j.contains("suites")) {
      c.suites.clear();
      for (const auto& s : j.at("suites")) {
        SuiteSpec spec;
        read_key(s, "suite", spec.suite);
        read_key(s, "count", spec.count);
        read_key(s, "seed", spec.seed);
        read_key(s, "n", spec.n);
        read_key(s, "body_min", spec.body_min);
        read_key(s, "body_max", spec.body_max);
        c.suites.push_back(spec);
      }
    }
    if (j.contains("decode")) {
      const auto& d = j.at("decode");
      read_key(d, "max_skeleton_tokens", c.decode.max_skeleton_tokens);
      read_key(d, "max_steps_per_branch", c.decode.max_steps_per_branch);
      read_key(d, "max_continuation_tokens", c.decode.max_continuation_tokens);
      read_key(d, "max_normal_tokens", c.decode.max_normal_tokens);
      read_key(d, "max_blocks", c.decode.max_blocks);
      read_key(d, "cap_is_error", c.decode.cap_is_error);
    }
    read_key(j, "include_timing", c.include_timing);
    read_key(j, "threads", c.threads);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfiguration, std::string("bench config: ") + e.what());
  }
  c.decode.validate();
  if (c.threads == 0) c.threads = 1;
  return c;
}

BenchConfig load_bench_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_bench_config(ss.str());
}

TaskScript make_task(const SuiteSpec& spec, std::size_t index) {
  const std::uint64_t seed = spec.seed + index;
  if (spec.suite == "retrieval") return gen_retrieval_task(spec.n, seed, {spec.body_min, spec.body_max});
  if (spec.suite == "multidoc") return gen_multidoc_task(spec.n, seed);
  if (spec.suite == "planning") {
    return gen_planning_task(spec.n == 0 ? planning_aspect_count(seed) : spec.n, seed);
  }
  if (spec.suite == "single-branch") return gen_single_branch_task(seed, spec.body_max);
  if (spec.suite == "two-block") return gen_two_block_task(seed);
  throw Error(ErrorCode::kInvalidTaskParameter, "unknown suite '" + spec.suite + "'");
}

std::vector<TaskScript> build_suite(const SuiteSpec& spec) {
  std::vector<TaskScript> out;
  out.reserve(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) out.push_back(make_task(spec, i));
  return out;
}

std::size_t analytic_normal_passes(const TaskScript& task) { return task.canonical_answer().size(); }

std::size_t analytic_parallel_passes(const TaskScript& task) {
  // Plain decoding spends one pass per answer token. In parallel mode the
  // body tokens of a block cost max body length passes instead of their sum,
  // plus one ELLIPSIS per branch in the skeleton and one title prefill.
  std::size_t passes = task.canonical_answer().size();
  for (const auto& block : task.blocks) {
    std::size_t sum = 0;
    std::size_t longest = 0;
    for (const auto& body : block.bodies) {
      const std::size_t len = vocab::encode(body).size();
      sum += len;
      longest = std::max(longest, len);
    }
    passes = passes - sum + block.titles.size() + 1 + longest;
  }
  return passes;
}

double analytic_speedup(const TaskScript& task) {
  return static_cast<double>(analytic_normal_passes(task)) /
         static_cast<double>(analytic_parallel_passes(task));
}

ModeResult run_task_mode(const TaskScript& task, DecodeMode mode, const DecodeConfig& decode,
                         DecodeTrace* trace_out) {
  ModeResult m;
  try {
    const auto engine = scripted_engine(task);
    const PipelineResult r = run_mode(mode, *engine, task.task_text, decode);
    m.tokens_emitted = r.trace.answer_tokens;
    m.forward_passes = r.trace.total_forward_passes();
    m.prefill_passes = r.trace.total_prefill_passes();
    m.decode_passes = m.forward_passes - m.prefill_passes;
    m.wall_ms = r.trace.total_wall_ms();
    m.tokens_per_pass = m.forward_passes == 0 ? 0.0
                                              : static_cast<double>(m.tokens_emitted) /
                                                    static_cast<double>(m.forward_passes);
    m.blocks = r.trace.blocks;
    if (!task.answer_prefix.empty()) {
      m.answer = extract_answer(r.final_text, task.answer_prefix).value_or("");
    }
    if (task.expected_answer) m.correct = answer_correct(task, r.final_text);
    m.structure_ok = std::all_of(task.required_phrases.begin(), task.required_phrases.end(),
                                 [&](const std::string& p) { return r.final_text.find(p) != std::string::npos; });
    if (trace_out) *trace_out = r.trace;
  } catch (const Error& e) {
    m.error = e.what();
  }
  return m;
}

TaskResult run_task(const TaskScript& task, const DecodeConfig& decode) {
  TaskResult t;
  t.suite = task.suite;
  t.seed = task.seed;
  t.n_branches = task.shape.n_branches;
  t.analytic_speedup = analytic_speedup(task);
  DecodeTrace normal_trace;
  DecodeTrace parallel_trace;
  t.normal = run_task_mode(task, DecodeMode::kNormal, decode, &normal_trace);
  t.parallel = run_task_mode(task, DecodeMode::kParallel, decode, &parallel_trace);
  if (t.normal.error.empty() && t.parallel.error.empty() && t.normal.tokens_per_pass > 0.0) {
    t.speedup = t.parallel.tokens_per_pass / t.normal.tokens_per_pass;
    t.answers_match = normal_trace.final_text == parallel_trace.final_text;
  }
  t.position_law_violations = oracle::position_law_violations(parallel_trace);
  return t;
}

SuiteSummary summarize(const std::string& suite, const std::vector<TaskResult>& tasks) {
  SuiteSummary s;
  s.suite = suite;
  std::vector<double> ntp, ptp, nms, pms, sp, an;
  std::size_t ncorrect = 0, pcorrect = 0, nstruct = 0, pstruct = 0;
  bool has_exact = false;
  for (const auto& t : tasks) {
    if (t.suite != suite) continue;
    ++s.tasks;
    s.position_law_violations += t.position_law_violations;
    if (!t.normal.error.empty() || !t.parallel.error.empty()) {
      ++s.errors;
      continue;
    }
    if (!t.answers_match) ++s.mode_mismatches;
    ntp.push_back(t.normal.tokens_per_pass);
    ptp.push_back(t.parallel.tokens_per_pass);
    nms.push_back(t.normal.wall_ms);
    pms.push_back(t.parallel.wall_ms);
    sp.push_back(t.speedup);
    an.push_back(t.analytic_speedup);
    s.max_relative_gap = std::max(s.max_relative_gap, std::fabs(t.speedup / t.analytic_speedup - 1.0));
    if (t.normal.correct) {
      has_exact = true;
      ncorrect += *t.normal.correct ? 1 : 0;
      pcorrect += t.parallel.correct.value_or(false) ? 1 : 0;
    }
    nstruct += t.normal.structure_ok ? 1 : 0;
    pstruct += t.parallel.structure_ok ? 1 : 0;
  }
  s.normal_tokens_per_pass = mean(ntp);
  s.parallel_tokens_per_pass = mean(ptp);
  s.normal_wall_ms = mean(nms);
  s.parallel_wall_ms = mean(pms);
  s.mean_speedup = mean(sp);
  s.mean_analytic_speedup = mean(an);
  if (s.tasks > 0) {
    // Failed tasks count as wrong.
    const auto denom = static_cast<double>(s.tasks);
    if (has_exact) {
      s.normal_quality = static_cast<double>(ncorrect) / denom;
      s.parallel_quality = static_cast<double>(pcorrect) / denom;
    } else {
      s.normal_quality = static_cast<double>(nstruct) / denom;
      s.parallel_quality = static_cast<double>(pstruct) / denom;
    }
  }
  return s;
}

BenchReport run_bench(const std::vector<TaskScript>& tasks, const BenchConfig& config) {
  if (tasks.empty()) throw Error(ErrorCode::kInvalidTaskParameter, "empty suite");
  BenchReport report;
  report.include_timing = config.include_timing;
  report.tasks.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      report.tasks[i] = run_task(tasks[i], config.decode);
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(config.threads, tasks.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  std::vector<std::string> order;
  for (const auto& t : tasks) {
    if (std::find(order.begin(), order.end(), t.suite) == order.end()) order.push_back(t.suite);
  }
  for (const auto& name : order) report.suites.push_back(summarize(name, report.tasks));
  return report;
}

BenchReport run_bench(const BenchConfig& config) {
  std::vector<TaskScript> tasks;
  for (const auto& spec : config.suites) {
    auto suite = build_suite(spec);
    tasks.insert(tasks.end(), std::make_move_iterator(suite.begin()), std::make_move_iterator(suite.end()));
  }
  return run_bench(tasks, config);
}

std::string BenchReport::to_json() const {
  ojson j;
  j["schema"] = "treedec.bench_report/1";
  j["include_timing"] = include_timing;
  ojson suites_json = ojson::array();
  for (const auto& s : suites) {
    ojson e;
    e["suite"] = s.suite;
    e["tasks"] = s.tasks;
    e["errors"] = s.errors;
    e["normal_tokens_per_pass"] = s.normal_tokens_per_pass;
    e["parallel_tokens_per_pass"] = s.parallel_tokens_per_pass;
    e["mean_speedup"] = s.mean_speedup;
    e["mean_analytic_speedup"] = s.mean_analytic_speedup;
    e["max_relative_gap"] = s.max_relative_gap;
    e["normal_quality"] = optional_json(s.normal_quality);
    e["parallel_quality"] = optional_json(s.parallel_quality);
    e["position_law_violations"] = s.position_law_violations;
    e["mode_mismatches"] = s.mode_mismatches;
    if (include_timing) {
      e["normal_wall_ms"] = s.normal_wall_ms;
      e["parallel_wall_ms"] = s.parallel_wall_ms;
    }
    suites_json.push_back(std::move(e));
  }
  j["suites"] = std::move(suites_json);
  ojson rows = ojson::array();
  for (const auto& t : tasks) {
    ojson r;
    r["suite"] = t.suite;
    r["seed"] = t.seed;
    r["n_branches"] = t.n_branches;
    r["analytic_speedup"] = t.analytic_speedup;
    r["speedup"] = t.speedup;
    r["answers_match"] = t.answers_match;
    r["position_law_violations"] = t.position_law_violations;
    r["normal"] = mode_json(t.normal, include_timing);
    r["parallel"] = mode_json(t.parallel, include_timing);
    rows.push_back(std::move(r));
  }
  j["tasks"] = std::move(rows);
  return j.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

std::string BenchReport::to_csv() const {
  std::ostringstream os;
  os << "Task,Method,Answer Quality,Tokens/Pass,Time (ms)\n";
  for (const auto& s : suites) {
    auto row = [&](const char* method, const std::optional<double>& q, double tpp, double ms) {
      os << s.suite << ',' << method << ',' << (q ? fmt_fixed(*q, 2) : std::string("-")) << ','
         << fmt_fixed(tpp, 3) << ',' << (include_timing ? fmt_fixed(ms, 3) : std::string("-")) << '\n';
    };
    row("Normal", s.normal_quality, s.normal_tokens_per_pass, s.normal_wall_ms);
    row("Ours", s.parallel_quality, s.parallel_tokens_per_pass, s.parallel_wall_ms);
  }
  return os.str();
}

}  // namespace treedec
