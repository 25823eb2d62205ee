// Copyright 2026 The sapa-cpp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <string>
#include <vector>

#include "sapa/similarity.hpp"
#include "sapa/tensor_io.hpp"

namespace sapa {
namespace {

namespace fs = std::filesystem;

// (C, d, 1) tensor holding M transposed, M row-major d x C.
Tensor<float> matrix_to_tensor(const std::vector<float>& m, int d, int c) {
  Tensor<float> t(c, d, 1);
  for (int j = 0; j < d; ++j) {
    for (int ch = 0; ch < c; ++ch) {
      t(ch, j, 0) = m[static_cast<size_t>(j) * c + ch];
    }
  }
  return t;
}

std::vector<float> matrix_from_tensor(const Tensor<float>& t, int d, int c,
                                      const std::string& name) {
  if (t.height() != c || t.width() != d || t.channels() != 1) {
    throw ConfigError(name + ": expected shape " +
                      Tensor<float>::shape_string(c, d, 1) + ", got " +
                      t.shape_string());
  }
  std::vector<float> m(static_cast<size_t>(d) * c);
  for (int j = 0; j < d; ++j) {
    for (int ch = 0; ch < c; ++ch) {
      m[static_cast<size_t>(j) * c + ch] = t(ch, j, 0);
    }
  }
  return m;
}

}  // namespace

void save_params(const SapaParams<float>& params, const std::string& dir) {
  fs::create_directories(dir);
  write_tensor(matrix_to_tensor(params.p_x, params.embed_dim,
                                params.decoder_channels),
               (fs::path(dir) / "p_x.sapt").string());
  write_tensor(matrix_to_tensor(params.p_y, params.embed_dim,
                                params.encoder_channels),
               (fs::path(dir) / "p_y.sapt").string());
  Tensor<float> g(params.decoder_channels + 1, 1, 1);
  for (int ch = 0; ch < params.decoder_channels; ++ch) {
    g(ch, 0, 0) = params.gate_w[static_cast<size_t>(ch)];
  }
  g(params.decoder_channels, 0, 0) = params.gate_bias;
  write_tensor(g, (fs::path(dir) / "gate.sapt").string());
}

SapaParams<float> load_params(const std::string& dir, int decoder_channels,
                              int encoder_channels, int embed_dim,
                              uint64_t seed) {
  SapaParams<float> params = SapaParams<float>::seeded(
      decoder_channels, encoder_channels, embed_dim, seed);
  const fs::path base(dir);

  const fs::path px_path = base / "p_x.sapt";
  if (fs::exists(px_path)) {
    params.p_x = matrix_from_tensor(read_tensor(px_path.string()), embed_dim,
                                    decoder_channels, px_path.string());
  }
  const fs::path py_path = base / "p_y.sapt";
  if (fs::exists(py_path)) {
    params.p_y = matrix_from_tensor(read_tensor(py_path.string()), embed_dim,
                                    encoder_channels, py_path.string());
  }
  const fs::path gate_path = base / "gate.sapt";
  if (fs::exists(gate_path)) {
    const Tensor<float> g = read_tensor(gate_path.string());
    if (g.height() != decoder_channels + 1 || g.width() != 1 ||
        g.channels() != 1) {
      throw ConfigError(gate_path.string() + ": expected shape " +
                        Tensor<float>::shape_string(decoder_channels + 1, 1, 1) +
                        ", got " + g.shape_string());
    }
    for (int ch = 0; ch < decoder_channels; ++ch) {
      params.gate_w[static_cast<size_t>(ch)] = g(ch, 0, 0);
    }
    params.gate_bias = g(decoder_channels, 0, 0);
  }
  return params;
}

}  // namespace sapa
