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
#include <span>
#include <string>
#include <vector>

#include "treedec/model/forward_engine.hpp"
#include "treedec/model/model_config.hpp"

namespace treedec {

// Weights of the tiny decoder. Matrices are row-major [in x out].
struct TransformerWeights {
  struct Layer {
    std::vector<float> attn_norm;  // [hidden]
    std::vector<float> wq, wk, wv, wo;  // [hidden x hidden]
    std::vector<float> mlp_norm;  // [hidden]
    std::vector<float> w_up;  // [hidden x ffn]
    std::vector<float> w_down;  // [ffn x hidden]
  };

  std::vector<float> embedding;  // [vocab x hidden]
  std::vector<Layer> layers;
  std::vector<float> final_norm;  // [hidden]
  std::vector<float> lm_head;  // [hidden x vocab]

  // Seeded N(0, 0.02) for matrices, ones for norm gains.
  static TransformerWeights random(const ModelConfig& config);
};

// Pre-norm decoder: RMSNorm, rotary multi-head attention over an explicit
// mask, SiLU MLP. Arithmetic is 32-bit with a fixed accumulation order
// (over head_dim, then over keys in cache-index order), so results for a row
// depend only on the row's token, position and visible keys.
class Transformer final : public ForwardEngine {
 public:
  Transformer(ModelConfig config, TransformerWeights weights);

  const ModelConfig& config() const { return config_; }
  const TransformerWeights& weights() const { return weights_; }

  std::size_t vocab_size() const override { return config_.vocab_size; }
  KVCache make_cache() const override;
  Logits forward(const ForwardRequest& request, KVCache& cache) const override;

 private:
  ModelConfig config_;
  TransformerWeights weights_;
  std::vector<float> inv_freq_;  // [head_dim / 2]
};

// Deterministic engine from config.seed; throws Error(kInvalidConfig).
std::unique_ptr<Transformer> init_model(const ModelConfig& config);

}  // namespace treedec
