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

#include "treedec/model/weights_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "treedec/error.hpp"

namespace treedec {
namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'T', 'R', 'E', 'E', 'D', 'E', 'C', 'W'};

struct TensorRef {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<float>* data;
};

std::vector<TensorRef> tensor_table(TransformerWeights& w, const ModelConfig& c) {
  const std::size_t d = c.hidden_dim;
  const std::size_t f = c.ffn_dim();
  std::vector<TensorRef> out;
  out.push_back({"embedding", {c.vocab_size, d}, &w.embedding});
  for (std::size_t l = 0; l < w.layers.size(); ++l) {
    auto& L = w.layers[l];
    const std::string p = "layers." + std::to_string(l) + ".";
    out.push_back({p + "attn_norm", {d}, &L.attn_norm});
    out.push_back({p + "wq", {d, d}, &L.wq});
    out.push_back({p + "wk", {d, d}, &L.wk});
    out.push_back({p + "wv", {d, d}, &L.wv});
    out.push_back({p + "wo", {d, d}, &L.wo});
    out.push_back({p + "mlp_norm", {d}, &L.mlp_norm});
    out.push_back({p + "w_up", {d, f}, &L.w_up});
    out.push_back({p + "w_down", {f, d}, &L.w_down});
  }
  out.push_back({"final_norm", {d}, &w.final_norm});
  out.push_back({"lm_head", {d, c.vocab_size}, &w.lm_head});
  return out;
}

std::uint32_t to_le(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  }
  return v;
}

void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t read_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

json config_json(const ModelConfig& c) {
  return {{"n_layers", c.n_layers},     {"n_heads", c.n_heads},
          {"head_dim", c.head_dim},     {"hidden_dim", c.hidden_dim},
          {"vocab_size", c.vocab_size}, {"rope_theta", c.rope_theta},
          {"seed", c.seed}};
}

}  // namespace

void save_weights(const Transformer& model, const std::filesystem::path& path) {
  TransformerWeights w = model.weights();
  const auto table = tensor_table(w, model.config());
  json header;
  header["format"] = "treedec-weights";
  header["version"] = 1;
  header["config"] = config_json(model.config());
  std::size_t offset = 0;
  for (const auto& t : table) {
    header["tensors"].push_back({{"name", t.name}, {"shape", t.shape}, {"offset", offset}});
    offset += t.data->size() * sizeof(float);
  }
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(kMagic, sizeof(kMagic));
  write_u64(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& t : table) {
    for (float v : *t.data) {
      std::uint32_t bits;
      std::memcpy(&bits, &v, sizeof(bits));
      bits = to_le(bits);
      out.write(reinterpret_cast<const char*>(&bits), sizeof(bits));
    }
  }
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

std::unique_ptr<Transformer> load_weights(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorCode::kIo, path.string() + " is not a treedec weight file");
  }
  const std::uint64_t header_len = read_u64(in);
  std::string text(header_len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw Error(ErrorCode::kIo, "truncated header in " + path.string());

  json header;
  try {
    header = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("bad weight header: ") + e.what());
  }
  const auto& jc = header.at("config");
  ModelConfig config;
  config.n_layers = jc.at("n_layers").get<std::size_t>();
  config.n_heads = jc.at("n_heads").get<std::size_t>();
  config.head_dim = jc.at("head_dim").get<std::size_t>();
  config.hidden_dim = jc.at("hidden_dim").get<std::size_t>();
  config.vocab_size = jc.at("vocab_size").get<std::size_t>();
  config.rope_theta = jc.at("rope_theta").get<float>();
  config.seed = jc.at("seed").get<std::uint64_t>();
  config.validate();

  TransformerWeights w;
  w.layers.resize(config.n_layers);
  auto table = tensor_table(w, config);
  const auto& tensors = header.at("tensors");
  if (tensors.size() != table.size()) {
    throw Error(ErrorCode::kIo, "tensor count mismatch in " + path.string());
  }
  const auto data_start = in.tellg();
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& jt = tensors[i];
    if (jt.at("name").get<std::string>() != table[i].name ||
        jt.at("shape").get<std::vector<std::size_t>>() != table[i].shape) {
      throw Error(ErrorCode::kIo, "unexpected tensor '" + jt.at("name").get<std::string>() + "'");
    }
    std::size_t count = 1;
    for (auto s : table[i].shape) count *= s;
    in.seekg(data_start + static_cast<std::streamoff>(jt.at("offset").get<std::size_t>()));
    table[i].data->resize(count);
    for (auto& v : *table[i].data) {
      std::uint32_t bits;
      in.read(reinterpret_cast<char*>(&bits), sizeof(bits));
      bits = to_le(bits);
      std::memcpy(&v, &bits, sizeof(v));
    }
    if (!in) throw Error(ErrorCode::kIo, "truncated tensor data in " + path.string());
  }
  return std::make_unique<Transformer>(config, std::move(w));
}

}  // namespace treedec
