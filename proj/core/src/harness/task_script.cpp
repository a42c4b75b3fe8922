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

#include "treedec/harness/task_script.hpp"

#include <set>

#include "treedec/error.hpp"
#include "treedec/skeleton/vocabulary.hpp"

namespace treedec {
namespace {

bool has_control(const std::string& s) {
  for (TokenId t : vocab::encode(s)) {
    if (t == vocab::kMark || t == vocab::kTerm || t == vocab::kEllipsis) return true;
  }
  return false;
}

void append(TokenSeq& out, const std::string& text) {
  const auto t = vocab::encode(text);
  out.insert(out.end(), t.begin(), t.end());
}

}  // namespace

void TaskScript::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidTaskParameter, what); };
  if (task_text.empty()) fail("empty task text");
  if (texts.size() != blocks.size() + 1) fail("need one text segment around every block");
  if (rules.size() != blocks.size()) fail("need one conclusion rule per block");
  for (const auto& t : texts) {
    if (has_control(t)) fail("text segment contains a control string");
  }
  for (const auto& b : blocks) {
    if (b.titles.empty()) fail("block without steps");
    if (b.titles.size() != b.bodies.size()) fail("titles/bodies size mismatch");
    std::set<std::string> seen;
    for (const auto& t : b.titles) {
      if (t.empty()) fail("empty title");
      if (!seen.insert(t).second) fail("duplicate title '" + t + "'");
      for (TokenId tok : vocab::encode(t)) {
        if (!vocab::is_byte(tok)) fail("title '" + t + "' contains a special token");
      }
    }
    for (const auto& body : b.bodies) {
      if (has_control(body)) fail("body contains a control string");
    }
  }
}

TokenSeq TaskScript::canonical_answer() const {
  TokenSeq out;
  append(out, texts[0]);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const auto& b = blocks[k];
    for (std::size_t i = 0; i < b.titles.size(); ++i) {
      out.push_back(vocab::kMark);
      append(out, b.titles[i]);
      out.push_back(vocab::kColon);
      append(out, b.bodies[i]);
    }
    out.push_back(vocab::kMark);
    out.push_back(vocab::kTerm);
    const auto& rule = rules[k];
    std::string text = texts[k + 1];
    switch (rule.kind) {
      case ConclusionRule::Kind::kFixed: break;
      case ConclusionRule::Kind::kTitleOfMarked:
      case ConclusionRule::Kind::kBodyExcerpt: {
        std::string found = rule.not_found;
        for (std::size_t i = 0; i < b.titles.size(); ++i) {
          const auto at = b.bodies[i].find(rule.marker);
          if (at == std::string::npos) continue;
          if (rule.kind == ConclusionRule::Kind::kTitleOfMarked) {
            found = b.titles[i];
          } else {
            const auto from = at + rule.marker.size();
            const auto to = b.bodies[i].find(rule.stop, from);
            found = b.bodies[i].substr(from, to == std::string::npos ? std::string::npos : to - from);
          }
          break;
        }
        text = rule.text + found + texts[k + 1];
        break;
      }
    }
    append(out, text);
  }
  out.push_back(vocab::kEos);
  return out;
}

std::optional<std::string> extract_answer(const std::string& final_text, const std::string& prefix) {
  const auto at = final_text.rfind(prefix);
  if (at == std::string::npos) return std::nullopt;
  const auto from = at + prefix.size();
  const auto eol = final_text.find('\n', from);
  return final_text.substr(from, eol == std::string::npos ? std::string::npos : eol - from);
}

bool answer_correct(const TaskScript& task, const std::string& final_text) {
  if (task.expected_answer) {
    const auto got = extract_answer(final_text, task.answer_prefix);
    return got && *got == *task.expected_answer;
  }
  for (const auto& phrase : task.required_phrases) {
    if (final_text.find(phrase) == std::string::npos) return false;
  }
  return true;
}

}  // namespace treedec
