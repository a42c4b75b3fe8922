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

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "treedec/error.hpp"
#include "treedec/harness/bench.hpp"
#include "treedec/harness/script_engine.hpp"
#include "treedec/layout/tree_mask.hpp"
#include "treedec/model/model_config.hpp"
#include "treedec/model/transformer.hpp"
#include "treedec/model/weights_io.hpp"
#include "treedec/oracle/invariants.hpp"
#include "treedec/oracle/isolation.hpp"
#include "treedec/oracle/kv_reuse.hpp"
#include "treedec/oracle/mask_oracle.hpp"
#include "treedec/pipeline/pipeline.hpp"

namespace {

using namespace treedec;
using ojson = nlohmann::ordered_json;

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  const auto parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << text;
}

std::unique_ptr<Transformer> load_model(const std::string& config_path, const std::string& weights) {
  if (!weights.empty()) return load_weights(weights);
  return init_model(load_model_config(config_path));
}

std::vector<std::size_t> parse_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const unsigned long v = std::stoul(item, &used);
    if (used != item.size()) throw Error(ErrorCode::kInvalidConfig, "bad list item '" + item + "'");
    out.push_back(v);
  }
  return out;
}

struct GenerateArgs {
  std::string suite = "retrieval";
  std::uint64_t seed = 7;
  std::size_t n = 10;
  std::string mode = "parallel";
  std::string model_config;
  std::string weights;
  std::string task;
  std::string out;
  bool no_timing = false;
  std::size_t max_tokens = 256;
};

int run_generate(const GenerateArgs& a) {
  const DecodeMode mode = a.mode == "normal" ? DecodeMode::kNormal : DecodeMode::kParallel;
  ojson j;
  if (a.model_config.empty() && a.weights.empty()) {
    SuiteSpec spec;
    spec.suite = a.suite;
    spec.seed = a.seed;
    spec.n = a.suite == "planning" && a.n > 10 ? 0 : a.n;
    const TaskScript task = make_task(spec, 0);
    const auto engine = scripted_engine(task);
    const PipelineResult r = run_mode(mode, *engine, task.task_text, DecodeConfig{});
    j["engine"] = "scripted";
    j["suite"] = task.suite;
    j["seed"] = task.seed;
    j["mode"] = mode_name(mode);
    j["task"] = task.task_text;
    j["final_text"] = r.final_text;
    j["expected_answer"] = task.expected_answer ? ojson(*task.expected_answer) : ojson(nullptr);
    j["correct"] = answer_correct(task, r.final_text);
    j["trace"] = ojson::parse(r.trace.to_json(!a.no_timing));
  } else {
    // A real model gives no format guarantees, so caps end stages quietly.
    const auto model = load_model(a.model_config, a.weights);
    DecodeConfig config;
    config.cap_is_error = false;
    config.max_skeleton_tokens = a.max_tokens;
    config.max_steps_per_branch = a.max_tokens;
    config.max_continuation_tokens = a.max_tokens;
    config.max_normal_tokens = a.max_tokens;
    const std::string task = a.task.empty() ? "List three colors." : a.task;
    const PipelineResult r = run_mode(mode, *model, task, config);
    j["engine"] = "transformer";
    j["model"] = format_model_config(model->config());
    j["mode"] = mode_name(mode);
    j["task"] = task;
    j["final_text"] = r.final_text;
    j["trace"] = ojson::parse(r.trace.to_json(!a.no_timing));
  }
  write_output(a.out, j.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n");
  return 0;
}

struct BenchArgs {
  std::string config;
  std::string suite;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n;
  std::optional<std::size_t> count;
  std::optional<std::size_t> threads;
  std::string out;
  std::string csv;
  bool no_timing = false;
};

int run_bench_cmd(const BenchArgs& a) {
  BenchConfig config = a.config.empty() ? default_bench_config() : load_bench_config(a.config);
  if (!a.suite.empty()) {
    std::vector<SuiteSpec> kept;
    for (const auto& s : config.suites) {
      if (s.suite == a.suite) kept.push_back(s);
    }
    if (kept.empty()) {
      SuiteSpec s;
      s.suite = a.suite;
      kept.push_back(s);
    }
    config.suites = kept;
  }
  for (auto& s : config.suites) {
    if (a.seed) s.seed = *a.seed;
    if (a.n) s.n = *a.n;
    if (a.count) s.count = *a.count;
  }
  if (a.threads) config.threads = *a.threads;
  if (a.no_timing) config.include_timing = false;

  const BenchReport report = run_bench(config);
  const std::string csv = report.to_csv();
  std::cout << csv;
  if (!a.out.empty()) write_output(a.out, report.to_json());
  std::string csv_path = a.csv;
  if (csv_path.empty() && !a.out.empty()) {
    const auto dot = a.out.rfind('.');
    csv_path = (dot == std::string::npos ? a.out : a.out.substr(0, dot)) + ".csv";
  }
  if (!csv_path.empty()) write_output(csv_path, csv);
  std::size_t errors = 0;
  for (const auto& s : report.suites) errors += s.errors;
  if (errors > 0) std::cerr << errors << " task(s) failed; see report\n";
  return 0;
}

struct OracleArgs {
  std::uint64_t seed = 1;
  std::size_t cases = 50;
  std::size_t layouts = 1000;
  std::size_t kv_runs = 10;
  std::size_t bench_tasks = 20;
  std::string model_config;
};

int run_oracle(const OracleArgs& a) {
  bool ok = true;
  auto report = [&](const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s %-18s %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    ok = ok && pass;
  };
  std::mt19937_64 rng(a.seed);

  {
    std::size_t bad = 0, steps = 0;
    float worst = 0.0f;
    for (std::size_t i = 0; i < a.cases; ++i) {
      const auto c = oracle::random_isolation_case(rng);
      const auto model = init_model(c.config);
      const auto r = oracle::check_branch_isolation(*model, c.prefix, c.titles, c.max_steps);
      bad += r.ok() ? 0 : 1;
      steps += r.steps_compared;
      worst = std::max(worst, r.max_abs_diff);
    }
    report("isolation", bad == 0,
           std::to_string(a.cases) + " cases, " + std::to_string(steps) + " steps, max |dlogit| " +
               std::to_string(worst));
  }
  {
    std::size_t bad = 0;
    for (std::size_t i = 0; i < a.layouts; ++i) {
      const auto layout = oracle::random_layout(rng);
      bad += oracle::mask_mismatches(layout, tree_mask(layout)) == 0 ? 0 : 1;
    }
    report("mask", bad == 0, std::to_string(a.layouts) + " layouts, " + std::to_string(bad) + " mismatched");
  }
  {
    SuiteSpec spec;
    spec.suite = "retrieval";
    spec.count = a.bench_tasks;
    spec.seed = a.seed;
    std::size_t violations = 0;
    for (const auto& task : build_suite(spec)) {
      DecodeTrace trace;
      run_task_mode(task, DecodeMode::kParallel, DecodeConfig{}, &trace);
      violations += oracle::position_law_violations(trace);
    }
    report("position-law", violations == 0,
           std::to_string(a.bench_tasks) + " tasks, " + std::to_string(violations) + " violations");
  }
  {
    std::size_t bad = 0, checks = 0;
    for (std::size_t i = 0; i < a.kv_runs; ++i) {
      ModelConfig mc = a.model_config.empty() ? ModelConfig{} : load_model_config(a.model_config);
      if (a.model_config.empty()) {
        mc.n_layers = 1;
        mc.n_heads = 2;
        mc.head_dim = 8;
        mc.hidden_dim = 16;
      }
      mc.seed = a.seed + i;
      const auto model = init_model(mc);
      const auto r = oracle::check_kv_reuse(*model, oracle::random_kv_task(a.seed + i));
      bad += (r.violations == 0 && r.answer_matches && r.checks > 0) ? 0 : 1;
      checks += r.checks;
    }
    report("kv-reuse", bad == 0,
           std::to_string(a.kv_runs) + " runs, " + std::to_string(checks) + " checkpoints");
  }
  return ok ? 0 : 1;
}

struct MaskArgs {
  std::size_t prefix = 3;
  std::string titles = "2,4";
  std::size_t steps = 2;
  std::string finished;
  std::size_t continuation = 0;
  bool labels = false;
  std::string out;
};

int run_dump_mask(const MaskArgs& a) {
  const auto titles = parse_list(a.titles);
  const auto finished = parse_list(a.finished);
  if (!finished.empty() && finished.size() != titles.size()) {
    throw Error(ErrorCode::kLengthMismatch, "--finished needs one step per branch");
  }
  SequenceLayout layout = build_layout(a.prefix, titles);
  for (std::size_t s = 0; s < a.steps; ++s) {
    std::vector<bool> padded(titles.size(), false);
    for (std::size_t b = 0; b < finished.size(); ++b) padded[b] = s >= finished[b];
    layout.append_step(padded);
  }
  for (std::size_t i = 0; i < a.continuation; ++i) layout.append_continuation();
  const TreeMask mask = tree_mask(layout);
  write_output(a.out, a.labels ? render_layout(layout, mask) : render_mask_grid(mask));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel decoding within one sequence: tools"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "treedec 0.1.0");

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Run one task and print its final text and trace as JSON");
  g->add_option("--suite", gen.suite, "Task family")
      ->check(CLI::IsMember({"retrieval", "multidoc", "planning", "single-branch", "two-block"}));
  g->add_option("--seed", gen.seed, "Task seed");
  g->add_option("--n", gen.n, "Branch count (retrieval, multidoc, planning)");
  g->add_option("--mode", gen.mode, "Decoding mode")->check(CLI::IsMember({"normal", "parallel"}));
  g->add_option("--model-config", gen.model_config, "Use a randomly initialized transformer")
      ->check(CLI::ExistingFile);
  g->add_option("--weights", gen.weights, "Use a transformer loaded from a weights file")
      ->check(CLI::ExistingFile);
  g->add_option("--task", gen.task, "Task text for a transformer run");
  g->add_option("--max-tokens", gen.max_tokens, "Per-stage token cap for transformer runs");
  g->add_option("--out", gen.out, "Output path (default stdout)");
  g->add_flag("--no-timing", gen.no_timing, "Omit wall times");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Run suites in both modes; print the CSV table");
  b->add_option("--config", bench.config, "Suite config JSON")->check(CLI::ExistingFile);
  b->add_option("--suite", bench.suite, "Only this suite")
      ->check(CLI::IsMember({"retrieval", "multidoc", "planning", "single-branch", "two-block"}));
  b->add_option("--seed", bench.seed, "Base seed for every selected suite");
  b->add_option("--n", bench.n, "Branch count for every selected suite");
  b->add_option("--count", bench.count, "Tasks per suite");
  b->add_option("--threads", bench.threads, "Worker threads");
  b->add_option("--out", bench.out, "Report JSON path");
  b->add_option("--csv", bench.csv, "CSV path (default: next to --out)");
  b->add_flag("--no-timing", bench.no_timing, "Omit wall times for byte-identical reports");
  // Accepted for symmetry with the other subcommands; bench always runs both modes.
  std::string bench_mode;
  b->add_option("--mode", bench_mode, "Ignored: bench runs both modes")
      ->check(CLI::IsMember({"normal", "parallel"}));

  OracleArgs orc;
  auto* o = app.add_subcommand("oracle", "Run equivalence and mask oracles; nonzero exit on failure");
  o->add_option("--seed", orc.seed, "RNG seed");
  o->add_option("--cases", orc.cases, "Random isolation cases");
  o->add_option("--layouts", orc.layouts, "Random layouts for the mask check");
  o->add_option("--kv-runs", orc.kv_runs, "Guided transformer runs for the KV check");
  o->add_option("--bench-tasks", orc.bench_tasks, "Retrieval tasks for the position-law check");
  o->add_option("--model-config", orc.model_config, "Model for the KV check")->check(CLI::ExistingFile);

  MaskArgs mask;
  auto* m = app.add_subcommand("dump-mask", "Print the tree mask of a layout as a text grid");
  m->add_option("--prefix", mask.prefix, "Shared prefix length");
  m->add_option("--titles", mask.titles, "Comma-separated header lengths, one per branch");
  m->add_option("--steps", mask.steps, "Body steps");
  m->add_option("--finished", mask.finished, "Comma-separated step at which each branch pads");
  m->add_option("--continuation", mask.continuation, "Continuation slots");
  m->add_flag("--labels", mask.labels, "Prefix rows with role and position");
  m->add_option("--out", mask.out, "Output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*g) return run_generate(gen);
    if (*b) return run_bench_cmd(bench);
    if (*o) return run_oracle(orc);
    if (*m) return run_dump_mask(mask);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
