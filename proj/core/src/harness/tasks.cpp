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

#include "treedec/harness/tasks.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <random>
#include <set>

#include "treedec/error.hpp"
#include "treedec/skeleton/prompt.hpp"
#include "treedec/skeleton/vocabulary.hpp"

namespace treedec {
namespace {

// Uniform integer in [0, n) from raw engine output, so instances do not
// depend on the standard library's distribution implementations.
std::uint64_t draw(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

std::int64_t draw_between(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(draw(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

template <typename T>
std::vector<T> pick(std::mt19937_64& rng, std::vector<T> pool, std::size_t k) {
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(pool[i], pool[i + draw(rng, pool.size() - i)]);
  }
  pool.resize(k);
  return pool;
}

const std::vector<std::string>& name_pool() {
  static const std::vector<std::string> names = {
      "Ann", "Bob", "Cy",  "Dee", "Eve", "Finn", "Gus", "Hal", "Ida", "Jo",  "Kai", "Lea", "Max",
      "Ned", "Oli", "Pia", "Quy", "Ray", "Sam",  "Tia", "Uma", "Vic", "Wes", "Xia", "Yuri", "Zoe"};
  return names;
}

std::string gpa_text(std::int64_t hundredths) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%lld.%02lld", static_cast<long long>(hundredths / 100),
                static_cast<long long>(hundredths % 100));
  return buf;
}

// Pads `core` with filler to exactly `len` bytes (never shorter than core).
std::string fit_body(const std::string& core, std::size_t len) {
  static const std::string filler = "; checked against the bounds";
  std::string out = core;
  std::size_t k = 0;
  while (out.size() < len) out.push_back(filler[k++ % filler.size()]);
  return out;
}

void check_n(std::size_t n, std::size_t lo, std::size_t hi, const char* what) {
  if (n < lo || n > hi) {
    throw Error(ErrorCode::kInvalidTaskParameter,
                std::string(what) + " must be in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                    "], got " + std::to_string(n));
  }
}

void fill_shape(TaskScript& t) {
  const auto& b = t.blocks.front();
  t.shape.n_branches = b.titles.size();
  t.shape.body_min = SIZE_MAX;
  t.shape.body_max = 0;
  for (const auto& block : t.blocks) {
    for (const auto& body : block.bodies) {
      const auto len = vocab::encode(body).size();
      t.shape.body_min = std::min(t.shape.body_min, len);
      t.shape.body_max = std::max(t.shape.body_max, len);
    }
  }
  t.shape.prefix_len = stage1_prompt(t.task_text).size();
  t.validate();
}

struct Roster {
  std::vector<std::string> names;
  std::vector<std::int64_t> gpas;
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::size_t match = 0;
};

Roster make_roster(std::mt19937_64& rng, std::size_t n) {
  Roster r;
  r.names = pick(rng, name_pool(), n);
  r.lo = draw_between(rng, 200, 330);
  r.hi = r.lo + draw_between(rng, 20, 40);
  r.match = draw(rng, n);
  std::set<std::int64_t> used;
  r.gpas.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::int64_t g;
    if (i == r.match) {
      g = draw_between(rng, r.lo, r.hi);
    } else {
      do {
        g = draw_between(rng, 150, 400);
      } while ((g >= r.lo - 5 && g <= r.hi + 5) || used.count(g));
    }
    used.insert(g);
    r.gpas[i] = g;
  }
  return r;
}

ScriptBlock roster_block(const Roster& r, const std::vector<std::size_t>& lengths) {
  ScriptBlock b;
  for (std::size_t i = 0; i < r.names.size(); ++i) {
    const bool in = r.gpas[i] >= r.lo && r.gpas[i] <= r.hi;
    b.titles.push_back(r.names[i]);
    b.bodies.push_back(fit_body(" " + gpa_text(r.gpas[i]) + (in ? " within" : " out"), lengths[i]));
  }
  return b;
}

std::string roster_listing(const Roster& r) {
  std::string s;
  for (std::size_t i = 0; i < r.names.size(); ++i) s += r.names[i] + " " + gpa_text(r.gpas[i]) + "\n";
  return s;
}

std::string range_question(const Roster& r) {
  return "Which student has a GPA between " + gpa_text(r.lo) + " and " + gpa_text(r.hi) + "?";
}

ConclusionRule name_rule(const std::string& text) {
  ConclusionRule rule;
  rule.kind = ConclusionRule::Kind::kTitleOfMarked;
  rule.text = text;
  rule.marker = " within";
  return rule;
}

}  // namespace

TaskScript gen_retrieval_task(std::size_t n, std::uint64_t seed, RetrievalOptions options) {
  check_n(n, 2, 16, "retrieval n");
  if (options.body_min > options.body_max) {
    throw Error(ErrorCode::kInvalidTaskParameter, "body_min exceeds body_max");
  }
  std::mt19937_64 rng(seed);
  const Roster r = make_roster(rng, n);
  std::vector<std::size_t> lengths(n);
  for (auto& l : lengths) {
    l = static_cast<std::size_t>(draw_between(rng, static_cast<std::int64_t>(options.body_min),
                                              static_cast<std::int64_t>(options.body_max)));
  }

  TaskScript t;
  t.suite = "retrieval";
  t.seed = seed;
  t.task_text = "Students and GPAs:\n" + roster_listing(r) + range_question(r) +
                " Reply as \"Name: <name>\".";
  t.texts = {"Check each GPA.", ""};
  t.blocks = {roster_block(r, lengths)};
  t.rules = {name_rule("\nName: ")};
  t.expected_answer = r.names[r.match];
  t.answer_prefix = "Name: ";
  fill_shape(t);
  return t;
}

TaskScript gen_multidoc_task(std::size_t n, std::uint64_t seed) {
  check_n(n, 2, 16, "multidoc n");
  static const std::vector<std::string> people = {"Mira", "Teo", "Ravi", "Lena", "Omar", "Suki"};
  static const std::vector<std::string> cities = {"Lyon", "Osaka", "Quito", "Perth", "Turin",
                                                  "Cork", "Split", "Bergen"};
  static const std::vector<std::string> topics = {
      "rainfall", "bridges", "chess", "tea trade", "glaciers", "opera", "railways", "coral",
      "printing", "saffron", "lighthouses", "falconry", "kites", "salt mines", "ferries", "clocks"};
  std::mt19937_64 rng(seed);
  const std::string person = people[draw(rng, people.size())];
  const std::string city = cities[draw(rng, cities.size())];
  const auto chosen = pick(rng, topics, n);
  const std::size_t relevant = draw(rng, n);

  TaskScript t;
  t.suite = "multidoc";
  t.seed = seed;
  ScriptBlock block;
  std::string listing;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string title = std::string("Doc ") + static_cast<char>('A' + i);
    std::string doc;
    std::string body;
    if (i == relevant) {
      doc = person + " was born in " + city + " and studied " + chosen[i] + ".";
      body = " says born in " + city + ".";
    } else {
      doc = "A short history of " + chosen[i] + ".";
      body = " about " + chosen[i] + "; not relevant.";
    }
    listing += title + ": " + doc + "\n";
    block.titles.push_back(title);
    block.bodies.push_back(body);
  }
  t.task_text = listing + "Where was " + person + " born? Reply as \"Answer: <city>\".";
  t.texts = {"Read each document.", ""};
  t.blocks = {block};
  ConclusionRule rule;
  rule.kind = ConclusionRule::Kind::kBodyExcerpt;
  rule.text = "\nAnswer: ";
  rule.marker = "born in ";
  rule.stop = '.';
  t.rules = {rule};
  t.expected_answer = city;
  t.answer_prefix = "Answer: ";
  fill_shape(t);
  return t;
}

TaskScript gen_planning_task(std::size_t k, std::uint64_t seed) {
  check_n(k, 2, 10, "planning aspect count");
  static const std::vector<std::string> aspects = {"Cost",  "Risk",    "Team",   "Scope",
                                                   "Timing", "Users",  "Legal",  "Quality",
                                                   "Tools", "Vendors", "Safety", "Support"};
  static const std::vector<std::string> goals = {"a community garden", "a small web shop",
                                                 "a school trip", "an office move"};
  std::mt19937_64 rng(seed);
  const std::string goal = goals[draw(rng, goals.size())];
  const auto chosen = pick(rng, aspects, k);

  TaskScript t;
  t.suite = "planning";
  t.seed = seed;
  t.task_text = "Draft a plan for " + goal + ". Consider each aspect, then summarize.";
  ScriptBlock block;
  std::string summary = "\nSummary: covered";
  for (std::size_t i = 0; i < k; ++i) {
    block.titles.push_back(chosen[i]);
    block.bodies.push_back(" review " + chosen[i] + " for " + goal + "; list key actions.");
    summary += (i == 0 ? " " : ", ") + chosen[i];
  }
  t.texts = {"Plan by aspect.", summary + "."};
  t.blocks = {block};
  t.rules = {ConclusionRule{}};
  t.required_phrases = chosen;
  fill_shape(t);
  return t;
}

std::size_t planning_aspect_count(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::size_t k = 2;
  for (int i = 0; i < 8; ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    if (u < 0.3) ++k;
  }
  return k;
}

TaskScript gen_two_block_task(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Roster first = make_roster(rng, 3);
  const Roster second = make_roster(rng, 3);
  std::vector<std::size_t> lengths(3);
  for (auto& l : lengths) l = static_cast<std::size_t>(draw_between(rng, 12, 18));

  TaskScript t;
  t.suite = "two-block";
  t.seed = seed;
  t.task_text = "Group one:\n" + roster_listing(first) + range_question(first) + "\nGroup two:\n" +
                roster_listing(second) + range_question(second) +
                " Reply as \"First: <name>\" then \"Name: <name>\".";
  t.texts = {"Check group one.", "\nCheck group two.", ""};
  t.blocks = {roster_block(first, lengths), roster_block(second, lengths)};
  t.rules = {name_rule("\nFirst: "), name_rule("\nName: ")};
  t.expected_answer = second.names[second.match];
  t.answer_prefix = "Name: ";
  fill_shape(t);
  return t;
}

TaskScript gen_single_branch_task(std::uint64_t seed, std::size_t body_len) {
  std::mt19937_64 rng(seed);
  Roster r = make_roster(rng, 2);
  // Keep only the matching student.
  r.names = {r.names[r.match]};
  r.gpas = {r.gpas[r.match]};
  r.match = 0;

  TaskScript t;
  t.suite = "single-branch";
  t.seed = seed;
  t.task_text = "Students and GPAs:\n" + roster_listing(r) + range_question(r) +
                " Reply as \"Name: <name>\".";
  t.texts = {"Check each GPA.", ""};
  t.blocks = {roster_block(r, {body_len})};
  t.rules = {name_rule("\nName: ")};
  t.expected_answer = r.names[0];
  t.answer_prefix = "Name: ";
  fill_shape(t);
  return t;
}

}  // namespace treedec
