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

#include "treedec/skeleton/prompt.hpp"

#include <fstream>
#include <sstream>

#include "stage1_instruction_asset.hpp"
#include "treedec/error.hpp"
#include "treedec/skeleton/vocabulary.hpp"

namespace treedec {

std::string_view stage1_instruction() { return assets::kStage1Instruction; }

std::string load_instruction(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw Error(ErrorCode::kConfiguration, "instruction asset " + path.string() + " is empty");
  }
  return text;
}

TokenSeq stage1_prompt(std::string_view task, std::string_view instruction) {
  if (task.empty()) throw Error(ErrorCode::kInvalidTaskParameter, "task text is empty");
  if (instruction.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw Error(ErrorCode::kConfiguration, "instruction block is empty");
  }
  std::string text(task);
  text += "\n\n";
  text += instruction;
  return vocab::encode(text);
}

}  // namespace treedec
