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

#include "treedec/model/transformer.hpp"

#include <cmath>
#include <random>
#include <string>

#include "treedec/error.hpp"

namespace treedec {
namespace {

constexpr float kInitStd = 0.02f;
constexpr float kNormEps = 1e-6f;

void fill_normal(std::vector<float>& v, std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<float> dist(0.0f, kInitStd);
  v.resize(n);
  for (auto& x : v) x = dist(rng);
}

// out[j] = sum_i in[i] * w[i, j], summed in increasing i.
void matvec(std::span<const float> in, const std::vector<float>& w, std::span<float> out) {
  const std::size_t cols = out.size();
  for (auto& o : out) o = 0.0f;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const float a = in[i];
    const float* wrow = w.data() + i * cols;
    for (std::size_t j = 0; j < cols; ++j) out[j] += a * wrow[j];
  }
}

void rms_norm(std::span<const float> in, const std::vector<float>& gain, std::span<float> out) {
  float ss = 0.0f;
  for (float v : in) ss += v * v;
  const float scale = 1.0f / std::sqrt(ss / static_cast<float>(in.size()) + kNormEps);
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] * scale * gain[i];
}

// Rotates (x[i], x[i + half]) pairs of every head in place.
void apply_rotary(std::span<float> vec, std::size_t n_heads, std::size_t head_dim,
                  const std::vector<float>& inv_freq, PositionId position) {
  const std::size_t half = head_dim / 2;
  for (std::size_t h = 0; h < n_heads; ++h) {
    float* x = vec.data() + h * head_dim;
    for (std::size_t i = 0; i < half; ++i) {
      const double angle = static_cast<double>(position) * static_cast<double>(inv_freq[i]);
      const auto c = static_cast<float>(std::cos(angle));
      const auto s = static_cast<float>(std::sin(angle));
      const float x1 = x[i];
      const float x2 = x[i + half];
      x[i] = x1 * c - x2 * s;
      x[i + half] = x2 * c + x1 * s;
    }
  }
}

float silu(float x) { return x / (1.0f + std::exp(-x)); }

}  // namespace

TransformerWeights TransformerWeights::random(const ModelConfig& config) {
  config.validate();
  const std::size_t d = config.hidden_dim;
  const std::size_t f = config.ffn_dim();
  std::mt19937_64 rng(config.seed);
  TransformerWeights w;
  fill_normal(w.embedding, config.vocab_size * d, rng);
  w.layers.resize(config.n_layers);
  for (auto& layer : w.layers) {
    layer.attn_norm.assign(d, 1.0f);
    fill_normal(layer.wq, d * d, rng);
    fill_normal(layer.wk, d * d, rng);
    fill_normal(layer.wv, d * d, rng);
    fill_normal(layer.wo, d * d, rng);
    layer.mlp_norm.assign(d, 1.0f);
    fill_normal(layer.w_up, d * f, rng);
    fill_normal(layer.w_down, f * d, rng);
  }
  w.final_norm.assign(d, 1.0f);
  fill_normal(w.lm_head, d * config.vocab_size, rng);
  return w;
}

Transformer::Transformer(ModelConfig config, TransformerWeights weights)
    : config_(config), weights_(std::move(weights)) {
  config_.validate();
  const std::size_t d = config_.hidden_dim;
  const std::size_t f = config_.ffn_dim();
  auto expect = [](const std::vector<float>& v, std::size_t n, const char* name) {
    if (v.size() != n) {
      throw Error(ErrorCode::kInvalidConfig, std::string("weight '") + name + "' has " +
                                                 std::to_string(v.size()) + " values, expected " +
                                                 std::to_string(n));
    }
  };
  expect(weights_.embedding, config_.vocab_size * d, "embedding");
  if (weights_.layers.size() != config_.n_layers) {
    throw Error(ErrorCode::kInvalidConfig, "layer count does not match config");
  }
  for (const auto& layer : weights_.layers) {
    expect(layer.attn_norm, d, "attn_norm");
    expect(layer.wq, d * d, "wq");
    expect(layer.wk, d * d, "wk");
    expect(layer.wv, d * d, "wv");
    expect(layer.wo, d * d, "wo");
    expect(layer.mlp_norm, d, "mlp_norm");
    expect(layer.w_up, d * f, "w_up");
    expect(layer.w_down, f * d, "w_down");
  }
  expect(weights_.final_norm, d, "final_norm");
  expect(weights_.lm_head, d * config_.vocab_size, "lm_head");

  const std::size_t half = config_.head_dim / 2;
  inv_freq_.resize(half);
  for (std::size_t i = 0; i < half; ++i) {
    inv_freq_[i] = static_cast<float>(
        std::pow(static_cast<double>(config_.rope_theta),
                 -2.0 * static_cast<double>(i) / static_cast<double>(config_.head_dim)));
  }
}

KVCache Transformer::make_cache() const { return KVCache(config_.n_layers, config_.hidden_dim); }

Logits Transformer::forward(const ForwardRequest& request, KVCache& cache) const {
  if (cache.n_layers() != config_.n_layers || cache.kv_dim() != config_.hidden_dim) {
    throw Error(ErrorCode::kInvalidConfig, "cache shape does not match model");
  }
  const std::size_t base = cache.size();
  const auto rows = checked_rows(request, base);
  const std::size_t n = request.size();
  for (TokenId t : request.token_ids) {
    if (t < 0 || static_cast<std::size_t>(t) >= config_.vocab_size) {
      throw Error(ErrorCode::kInvalidToken, "token id " + std::to_string(t) + " outside vocab");
    }
  }

  const std::size_t d = config_.hidden_dim;
  const std::size_t hd = config_.head_dim;
  const std::size_t nh = config_.n_heads;
  const std::size_t f = config_.ffn_dim();
  const float scale = 1.0f / std::sqrt(static_cast<float>(hd));

  for (std::size_t r = 0; r < n; ++r) cache.append(request.token_ids[r], request.position_ids[r]);

  std::vector<float> x(n * d);
  for (std::size_t r = 0; r < n; ++r) {
    const auto t = static_cast<std::size_t>(request.token_ids[r]);
    std::copy_n(weights_.embedding.begin() + static_cast<std::ptrdiff_t>(t * d), d,
                x.begin() + static_cast<std::ptrdiff_t>(r * d));
  }

  std::vector<float> normed(d), q(n * d), attn(d), proj(d), up(f);
  std::vector<float> scores;
  for (std::size_t l = 0; l < config_.n_layers; ++l) {
    const auto& layer = weights_.layers[l];
    for (std::size_t r = 0; r < n; ++r) {
      std::span<float> xr(x.data() + r * d, d);
      std::span<float> qr(q.data() + r * d, d);
      rms_norm(xr, layer.attn_norm, normed);
      matvec(normed, layer.wq, qr);
      auto k = cache.key(l, base + r);
      auto v = cache.value(l, base + r);
      matvec(normed, layer.wk, k);
      matvec(normed, layer.wv, v);
      apply_rotary(qr, nh, hd, inv_freq_, request.position_ids[r]);
      apply_rotary(k, nh, hd, inv_freq_, request.position_ids[r]);
    }
    for (std::size_t r = 0; r < n; ++r) {
      const auto& visible = rows[r];
      scores.resize(visible.size());
      for (std::size_t h = 0; h < nh; ++h) {
        const float* qh = q.data() + r * d + h * hd;
        float max_score = -INFINITY;
        for (std::size_t j = 0; j < visible.size(); ++j) {
          const float* kh = cache.key(l, visible[j]).data() + h * hd;
          float s = 0.0f;
          for (std::size_t i = 0; i < hd; ++i) s += qh[i] * kh[i];
          s *= scale;
          scores[j] = s;
          if (s > max_score) max_score = s;
        }
        float denom = 0.0f;
        for (std::size_t j = 0; j < visible.size(); ++j) {
          scores[j] = std::exp(scores[j] - max_score);
          denom += scores[j];
        }
        float* out = attn.data() + h * hd;
        for (std::size_t i = 0; i < hd; ++i) out[i] = 0.0f;
        for (std::size_t j = 0; j < visible.size(); ++j) {
          const float w = scores[j] / denom;
          const float* vh = cache.value(l, visible[j]).data() + h * hd;
          for (std::size_t i = 0; i < hd; ++i) out[i] += w * vh[i];
        }
      }
      std::span<float> xr(x.data() + r * d, d);
      matvec(attn, layer.wo, proj);
      for (std::size_t i = 0; i < d; ++i) xr[i] += proj[i];
      rms_norm(xr, layer.mlp_norm, normed);
      matvec(normed, layer.w_up, up);
      for (auto& u : up) u = silu(u);
      matvec(up, layer.w_down, proj);
      for (std::size_t i = 0; i < d; ++i) xr[i] += proj[i];
    }
  }

  Logits logits(n, config_.vocab_size);
  for (std::size_t r = 0; r < n; ++r) {
    rms_norm(std::span<const float>(x.data() + r * d, d), weights_.final_norm, normed);
    auto out = logits.row(r);
    matvec(normed, weights_.lm_head, out);
    for (float v : out) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kNonFiniteLogits, "row " + std::to_string(r));
      }
    }
  }
  return logits;
}

std::unique_ptr<Transformer> init_model(const ModelConfig& config) {
  config.validate();
  return std::make_unique<Transformer>(config, TransformerWeights::random(config));
}

}  // namespace treedec
