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
#include <filesystem>
#include <string>
#include <string_view>

namespace treedec {

struct ModelConfig {
  std::size_t n_layers = 2;
  std::size_t n_heads = 4;
  std::size_t head_dim = 16;
  std::size_t hidden_dim = 64;
  std::size_t vocab_size = 262;
  float rope_theta = 10000.0f;
  std::uint64_t seed = 0;

  // MLP width is not configurable; it follows the usual 4x expansion.
  std::size_t ffn_dim() const { return 4 * hidden_dim; }

  // Throws Error(kInvalidConfig) on dimension mismatch or zero counts.
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

// Text format: one `key = value` per line, `#` starts a comment, keys are the
// field names above. Missing keys keep their defaults; unknown keys are errors.
ModelConfig parse_model_config(std::string_view text);
ModelConfig load_model_config(const std::filesystem::path& path);
std::string format_model_config(const ModelConfig& config);

}  // namespace treedec
