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
#include <memory>

#include "treedec/model/transformer.hpp"

namespace treedec {

// Layout on disk:
//   "TREEDECW" | u64 LE header length | JSON header | float32 LE tensor data
// The JSON header holds the ModelConfig and, for every tensor in layer order,
// its name, shape and byte offset into the data section.
void save_weights(const Transformer& model, const std::filesystem::path& path);
std::unique_ptr<Transformer> load_weights(const std::filesystem::path& path);

}  // namespace treedec
