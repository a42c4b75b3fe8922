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

#include <cstddef>

namespace treedec {

// Greedy decoding only: temperature is fixed at 0 and ties go to the lowest
// token id.
struct DecodeConfig {
  std::size_t max_skeleton_tokens = 1024;
  std::size_t max_steps_per_branch = 256;
  std::size_t max_continuation_tokens = 1024;
  std::size_t max_normal_tokens = 8192;  // normal-mode answer cap
  std::size_t max_blocks = 16;
  // When false, hitting a cap ends the stage quietly instead of throwing.
  bool cap_is_error = true;

  void validate() const;
};

}  // namespace treedec
