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

#include <memory>

#include "treedec/harness/task_script.hpp"
#include "treedec/model/scripted_engine.hpp"

namespace treedec {

// Next-token rule that plays `task` like a well-behaved model reading its
// own visible context: it writes the preamble, opens one step per title, and
// for a step whose title it can see writes that step's body (or moves on if
// the body was elided). Step bodies depend only on the prompt and the step's
// own title, so tree-isolated branches decode exactly as in a full answer.
NextTokenFn answer_script(const TaskScript& task);

// Engine that answers the stage-1 prompt of `task`.
std::unique_ptr<ScriptedEngine> scripted_engine(const TaskScript& task);

}  // namespace treedec
