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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "sapa/config.hpp"
#include "sapa/parallel.hpp"
#include "sapa/rng.hpp"
#include "sapa/tensor.hpp"

namespace sapa {

// Learnable state of the operator. p_x projects (layer-normed) decoder
// vectors and p_y encoder vectors into the d-dimensional embedding space;
// the gate projection maps a decoder vector to a scalar in (0, 1).
// LayerNorm has no learnable affine.
template <typename T>
struct SapaParams {
  int embed_dim = 0;
  int decoder_channels = 0;
  int encoder_channels = 0;
  std::vector<T> p_x;     // embed_dim x decoder_channels, row-major
  std::vector<T> p_y;     // embed_dim x encoder_channels, row-major
  std::vector<T> gate_w;  // decoder_channels
  T gate_bias = T(0);
  T layernorm_eps = T(1e-5);

  // Deterministic init: p_x, p_y, gate_w uniform in +-1/sqrt(C) of their
  // input channel count, drawn in that order from one seeded stream;
  // gate_bias starts at 0.
  static SapaParams seeded(int decoder_channels, int encoder_channels,
                           int embed_dim, uint64_t seed) {
    SapaParams p;
    p.embed_dim = embed_dim;
    p.decoder_channels = decoder_channels;
    p.encoder_channels = encoder_channels;
    Rng rng(seed);
    const double sx = 1.0 / std::sqrt(static_cast<double>(decoder_channels));
    const double sy = 1.0 / std::sqrt(static_cast<double>(encoder_channels));
    p.p_x.resize(static_cast<size_t>(embed_dim) * decoder_channels);
    for (T& v : p.p_x) v = static_cast<T>(rng.uniform(-sx, sx));
    p.p_y.resize(static_cast<size_t>(embed_dim) * encoder_channels);
    for (T& v : p.p_y) v = static_cast<T>(rng.uniform(-sy, sy));
    p.gate_w.resize(static_cast<size_t>(decoder_channels));
    for (T& v : p.gate_w) v = static_cast<T>(rng.uniform(-sx, sx));
    p.gate_bias = T(0);
    return p;
  }

  // Learnable parameter count of the given variant as implemented
  // (the gate carries a bias).
  size_t param_count(SimilarityKind kind) const {
    switch (kind) {
      case SimilarityKind::kInner:
        return 0;
      case SimilarityKind::kBilinear:
        return p_x.size() + p_y.size();
      case SimilarityKind::kGatedBilinear:
        return p_x.size() + p_y.size() + gate_w.size() + 1;
    }
    return 0;
  }
};

template <typename To, typename From>
SapaParams<To> params_cast(const SapaParams<From>& p) {
  SapaParams<To> out;
  out.embed_dim = p.embed_dim;
  out.decoder_channels = p.decoder_channels;
  out.encoder_channels = p.encoder_channels;
  out.p_x.assign(p.p_x.begin(), p.p_x.end());
  out.p_y.assign(p.p_y.begin(), p.p_y.end());
  out.gate_w.assign(p.gate_w.begin(), p.gate_w.end());
  out.gate_bias = static_cast<To>(p.gate_bias);
  out.layernorm_eps = static_cast<To>(p.layernorm_eps);
  return out;
}

namespace detail {

// LayerNorm across channels without affine: (v - mean) / sqrt(var + eps),
// biased variance. A constant vector maps to exact zeros (the residuals are
// forced to zero so float rounding in the mean cannot leak through).
// Returns 1 / sqrt(var + eps), which the backward pass reuses.
template <typename T>
T layer_norm_into(const T* v, T* out, int c, T eps) {
  T lo = v[0], hi = v[0];
  T sum = T(0);
  for (int i = 0; i < c; ++i) {
    lo = std::min(lo, v[i]);
    hi = std::max(hi, v[i]);
    sum += v[i];
  }
  const T inv_c = T(1) / static_cast<T>(c);
  if (lo == hi) {
    const T inv_s = T(1) / std::sqrt(eps);
    for (int i = 0; i < c; ++i) out[i] = T(0);
    return inv_s;
  }
  const T mean = sum * inv_c;
  T var = T(0);
  for (int i = 0; i < c; ++i) {
    const T r = v[i] - mean;
    var += r * r;
  }
  var *= inv_c;
  const T inv_s = T(1) / std::sqrt(var + eps);
  for (int i = 0; i < c; ++i) out[i] = (v[i] - mean) * inv_s;
  return inv_s;
}

template <typename T>
T dot(const T* a, const T* b, int n) {
  T acc = T(0);
  for (int i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

// out = M v for a row-major (rows x cols) matrix.
template <typename T>
void matvec(const T* m, const T* v, int rows, int cols, T* out) {
  for (int r = 0; r < rows; ++r) out[r] = dot(m + static_cast<size_t>(r) * cols, v, cols);
}

template <typename T>
T sigmoid(T z) {
  if (z >= T(0)) return T(1) / (T(1) + std::exp(-z));
  const T e = std::exp(z);
  return e / (T(1) + e);
}

}  // namespace detail

template <typename T>
std::vector<T> layer_norm(std::span<const T> v, T eps) {
  if (v.empty()) throw ConfigError("layer_norm: empty vector");
  std::vector<T> out(v.size());
  detail::layer_norm_into(v.data(), out.data(), static_cast<int>(v.size()), eps);
  return out;
}

// Per-pixel LayerNorm over the channel axis. When inv_scale is non-null it
// receives the per-pixel 1/sqrt(var + eps) as an HxWx1 tensor. Parallel
// over rows; each pixel is independent, so results do not depend on the
// thread count.
template <typename T>
Tensor<T> layer_norm_map(const Tensor<T>& t, T eps,
                         Tensor<T>* inv_scale = nullptr, int threads = 1) {
  Tensor<T> out(t.height(), t.width(), t.channels());
  if (inv_scale) *inv_scale = Tensor<T>(t.height(), t.width(), 1);
  parallel_for(t.height(), threads, [&](int r0, int r1) {
    for (int i = r0; i < r1; ++i) {
      for (int j = 0; j < t.width(); ++j) {
        const T inv_s = detail::layer_norm_into(t.vec(i, j), out.vec(i, j),
                                                t.channels(), eps);
        if (inv_scale) (*inv_scale)(i, j, 0) = inv_s;
      }
    }
  });
  return out;
}

// x . y. Both inputs are expected to be layer-normalized by the caller.
template <typename T>
T sim_inner(std::span<const T> x, std::span<const T> y) {
  if (x.size() != y.size()) {
    throw ConfigError("sim_inner: length mismatch " +
                      std::to_string(x.size()) + " vs " +
                      std::to_string(y.size()));
  }
  return detail::dot(x.data(), y.data(), static_cast<int>(x.size()));
}

// (P_x x) . (P_y y), computed through the two d-vectors, never through the
// C x C product.
template <typename T>
T sim_bilinear(std::span<const T> x, std::span<const T> y,
               const SapaParams<T>& params) {
  if (static_cast<int>(x.size()) != params.decoder_channels ||
      static_cast<int>(y.size()) != params.encoder_channels) {
    throw ConfigError("sim_bilinear: vector lengths " +
                      std::to_string(x.size()) + "/" + std::to_string(y.size()) +
                      " do not match projection dims " +
                      std::to_string(params.decoder_channels) + "/" +
                      std::to_string(params.encoder_channels));
  }
  std::vector<T> ex(params.embed_dim), ey(params.embed_dim);
  detail::matvec(params.p_x.data(), x.data(), params.embed_dim,
                 params.decoder_channels, ex.data());
  detail::matvec(params.p_y.data(), y.data(), params.embed_dim,
                 params.encoder_channels, ey.data());
  return detail::dot(ex.data(), ey.data(), params.embed_dim);
}

// sigmoid(gate_w . x_ln + bias) for the layer-normed decoder vector at the
// projected location.
template <typename T>
T gate(std::span<const T> x_ln, const SapaParams<T>& params) {
  if (static_cast<int>(x_ln.size()) != params.decoder_channels) {
    throw ConfigError("gate: vector length " + std::to_string(x_ln.size()) +
                      " does not match gate projection dim " +
                      std::to_string(params.decoder_channels));
  }
  const T z = detail::dot(params.gate_w.data(), x_ln.data(),
                          params.decoder_channels) +
              params.gate_bias;
  return detail::sigmoid(z);
}

// Gated similarity: with g = gate(x_center_ln) and the mixed query
// q = g (P_y y) + (1 - g) (P_x x_center), returns (P_x x_window) . q.
// The mixing happens in the d-dimensional embedded space, reusing the
// decoder's own embedding as the self term.
template <typename T>
T sim_gated(std::span<const T> x_center_ln, std::span<const T> x_window_ln,
            std::span<const T> y_ln, const SapaParams<T>& params) {
  if (static_cast<int>(x_center_ln.size()) != params.decoder_channels ||
      static_cast<int>(x_window_ln.size()) != params.decoder_channels ||
      static_cast<int>(y_ln.size()) != params.encoder_channels) {
    throw ConfigError("sim_gated: vector lengths do not match projections");
  }
  const T g = gate(x_center_ln, params);
  std::vector<T> ew(params.embed_dim), ec(params.embed_dim),
      ey(params.embed_dim);
  detail::matvec(params.p_x.data(), x_window_ln.data(), params.embed_dim,
                 params.decoder_channels, ew.data());
  detail::matvec(params.p_x.data(), x_center_ln.data(), params.embed_dim,
                 params.decoder_channels, ec.data());
  detail::matvec(params.p_y.data(), y_ln.data(), params.embed_dim,
                 params.encoder_channels, ey.data());
  T acc = T(0);
  for (int j = 0; j < params.embed_dim; ++j) {
    acc += ew[j] * (g * ey[j] + (T(1) - g) * ec[j]);
  }
  return acc;
}

// Read/write a params bundle as a directory of SAPT files (p_x.sapt,
// p_y.sapt, gate.sapt). Matrices are stored channels-as-rows: p_x.sapt has
// shape (C_dec, d, 1) with entry [c][j] = P_x[j][c], likewise p_y.sapt with
// C_enc rows; gate.sapt has shape (C_dec + 1, 1, 1), weights then bias.
// Missing files fall back to the seeded init for that piece.
void save_params(const SapaParams<float>& params, const std::string& dir);
SapaParams<float> load_params(const std::string& dir, int decoder_channels,
                              int encoder_channels, int embed_dim,
                              uint64_t seed);

}  // namespace sapa
