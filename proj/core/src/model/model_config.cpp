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

#include "treedec/model/model_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "treedec/error.hpp"
#include "treedec/skeleton/vocabulary.hpp"

namespace treedec {
namespace {

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kInvalidConfig,
                "bad value for '" + std::string(key) + "': '" + std::string(value) + "'");
  }
  return out;
}

}  // namespace

void ModelConfig::validate() const {
  if (n_layers < 1 || n_heads < 1 || head_dim < 1 || hidden_dim < 1) {
    throw Error(ErrorCode::kInvalidConfig, "all counts must be >= 1");
  }
  if (hidden_dim != n_heads * head_dim) {
    throw Error(ErrorCode::kInvalidConfig,
                "hidden_dim (" + std::to_string(hidden_dim) + ") != n_heads x head_dim (" +
                    std::to_string(n_heads * head_dim) + ")");
  }
  if (head_dim % 2 != 0) {
    throw Error(ErrorCode::kInvalidConfig, "head_dim must be even for rotary embedding");
  }
  if (vocab_size < static_cast<std::size_t>(vocab::kSize)) {
    throw Error(ErrorCode::kInvalidConfig,
                "vocab_size must be >= " + std::to_string(vocab::kSize));
  }
  if (!(rope_theta > 0.0f) || !std::isfinite(rope_theta)) {
    throw Error(ErrorCode::kInvalidConfig, "rope_theta must be a positive real");
  }
}

ModelConfig parse_model_config(std::string_view text) {
  ModelConfig config;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidConfig,
                  "line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const auto key = trim(view.substr(0, eq));
    const auto value = trim(view.substr(eq + 1));
    if (key == "n_layers") {
      config.n_layers = parse_number<std::size_t>(key, value);
    } else if (key == "n_heads") {
      config.n_heads = parse_number<std::size_t>(key, value);
    } else if (key == "head_dim") {
      config.head_dim = parse_number<std::size_t>(key, value);
    } else if (key == "hidden_dim") {
      config.hidden_dim = parse_number<std::size_t>(key, value);
    } else if (key == "vocab_size") {
      config.vocab_size = parse_number<std::size_t>(key, value);
    } else if (key == "rope_theta") {
      config.rope_theta = parse_number<float>(key, value);
    } else if (key == "seed") {
      config.seed = parse_number<std::uint64_t>(key, value);
    } else {
      throw Error(ErrorCode::kInvalidConfig, "unknown key '" + std::string(key) + "'");
    }
  }
  config.validate();
  return config;
}

ModelConfig load_model_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model_config(ss.str());
}

std::string format_model_config(const ModelConfig& c) {
  std::ostringstream out;
  out << "n_layers = " << c.n_layers << "\n"
      << "n_heads = " << c.n_heads << "\n"
      << "head_dim = " << c.head_dim << "\n"
      << "hidden_dim = " << c.hidden_dim << "\n"
      << "vocab_size = " << c.vocab_size << "\n"
      << "rope_theta = " << c.rope_theta << "\n"
      << "seed = " << c.seed << "\n";
  return out.str();
}

}  // namespace treedec
