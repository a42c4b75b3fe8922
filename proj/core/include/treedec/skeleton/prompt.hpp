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

#include <filesystem>
#include <string>
#include <string_view>

#include "treedec/types.hpp"

namespace treedec {

// The step-marking instruction block shipped in core/assets and embedded at
// build time.
std::string_view stage1_instruction();

// Reads an instruction file; throws Error(kConfiguration) if it is empty.
std::string load_instruction(const std::filesystem::path& path);

// Task text, a blank line, then the instruction block, encoded with specials.
TokenSeq stage1_prompt(std::string_view task, std::string_view instruction = stage1_instruction());

}  // namespace treedec
