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

#include <cmath>
#include <span>
#include <vector>

#include "sapa/config.hpp"
#include "sapa/macs.hpp"
#include "sapa/parallel.hpp"
#include "sapa/similarity.hpp"
#include "sapa/tensor.hpp"

namespace sapa {

// Per-output-point K x K kernel weights, output-point-major: the K^2 weights
// of output point (i', j') are contiguous, in WindowIndex offset order.
template <typename T>
struct KernelField {
  int out_height = 0;
  int out_width = 0;
  int k = 0;
  std::vector<T> weights;

  KernelField() = default;
  KernelField(int out_h, int out_w, int kernel_size)
      : out_height(out_h), out_width(out_w), k(kernel_size) {
    WindowIndex check(kernel_size);  // validates odd positive K
    weights.assign(static_cast<size_t>(out_h) * out_w * check.count(), T(0));
  }

  const T* window(int row, int col) const {
    return weights.data() + (static_cast<size_t>(row) * out_width + col) * k * k;
  }
  T* window(int row, int col) {
    return weights.data() + (static_cast<size_t>(row) * out_width + col) * k * k;
  }

  // Exports as an (out_h, out_w, K^2) tensor for file I/O and kernel maps.
  Tensor<T> to_tensor() const {
    return Tensor<T>::from_data(out_height, out_width, k * k, weights);
  }

  static KernelField from_tensor(const Tensor<T>& t) {
    const int k2 = t.channels();
    const int k = static_cast<int>(std::lround(std::sqrt(double(k2))));
    if (k * k != k2 || k % 2 == 0) {
      throw ConfigError("kernel field tensor must have an odd-square channel "
                        "count, got " + std::to_string(k2));
    }
    KernelField f(t.height(), t.width(), k);
    f.weights = t.data();
    return f;
  }
};

namespace detail {
constexpr double kDenomEps = 1e-8;  // zero-division guard for non-exp h(x)
}

// Turns one window of raw similarity scores into kernel weights,
// w_i = h(s_i) / sum_j h(s_j):
//   Exp      — softmax with per-window max subtraction.
//   Relu     — h = max(0, s); an all-zero denominator falls back to the
//              uniform kernel 1/K^2.
//   Sigmoid, Softplus — strictly positive h.
// Relu/Sigmoid/Softplus add 1e-8 to the denominator. None copies the scores
// through (no sum-to-1 guarantee). NaN scores raise NumericError.
template <typename T>
void normalize_window(std::span<const T> scores, std::span<T> out,
                      NormKind kind) {
  const int n = static_cast<int>(scores.size());
  if (n == 0 || out.size() != scores.size()) {
    throw ConfigError("normalize_window: bad span sizes");
  }
  for (int i = 0; i < n; ++i) {
    if (std::isnan(scores[i])) {
      throw NumericError("normalize_window: NaN score at index " +
                         std::to_string(i));
    }
  }
  switch (kind) {
    case NormKind::kExp: {
      T hi = scores[0];
      for (int i = 1; i < n; ++i) hi = std::max(hi, scores[i]);
      T den = T(0);
      for (int i = 0; i < n; ++i) {
        out[i] = std::exp(scores[i] - hi);
        den += out[i];
      }
      const T inv = T(1) / den;
      for (int i = 0; i < n; ++i) out[i] *= inv;
      return;
    }
    case NormKind::kRelu: {
      T den = T(0);
      for (int i = 0; i < n; ++i) {
        out[i] = scores[i] > T(0) ? scores[i] : T(0);
        den += out[i];
      }
      if (den == T(0)) {
        const T uniform = T(1) / static_cast<T>(n);
        for (int i = 0; i < n; ++i) out[i] = uniform;
        return;
      }
      const T inv = T(1) / (den + T(detail::kDenomEps));
      for (int i = 0; i < n; ++i) out[i] *= inv;
      return;
    }
    case NormKind::kSigmoid: {
      T den = T(0);
      for (int i = 0; i < n; ++i) {
        out[i] = detail::sigmoid(scores[i]);
        den += out[i];
      }
      const T inv = T(1) / (den + T(detail::kDenomEps));
      for (int i = 0; i < n; ++i) out[i] *= inv;
      return;
    }
    case NormKind::kSoftplus: {
      T den = T(0);
      for (int i = 0; i < n; ++i) {
        const T s = scores[i];
        out[i] = s > T(0) ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
        den += out[i];
      }
      const T inv = T(1) / (den + T(detail::kDenomEps));
      for (int i = 0; i < n; ++i) out[i] *= inv;
      return;
    }
    case NormKind::kNone: {
      for (int i = 0; i < n; ++i) out[i] = scores[i];
      return;
    }
  }
}

template <typename T>
std::vector<T> normalize_window(std::span<const T> scores, NormKind kind) {
  std::vector<T> out(scores.size());
  normalize_window(scores, std::span<T>(out), kind);
  return out;
}

namespace detail {

// Shape/parameter validation shared by the forward and backward passes.
template <typename T>
void validate_kernel_gen(const Tensor<T>& encoder, const Tensor<T>& decoder,
                         const SapaParams<T>& params,
                         const UpsamplerConfig& config) {
  config.validate();
  const int eh = config.ratio * decoder.height();
  const int ew = config.ratio * decoder.width();
  if (encoder.height() != eh || encoder.width() != ew) {
    throw ConfigError(
        "encoder spatial size " + std::to_string(encoder.height()) + "x" +
        std::to_string(encoder.width()) + " does not match expected (" +
        std::to_string(eh) + ", " + std::to_string(ew) + ") = ratio " +
        std::to_string(config.ratio) + " x decoder " +
        std::to_string(decoder.height()) + "x" +
        std::to_string(decoder.width()));
  }
  if (config.similarity == SimilarityKind::kInner) {
    if (encoder.channels() != decoder.channels()) {
      throw ConfigError("inner-product similarity requires equal channel "
                        "counts, got encoder " +
                        std::to_string(encoder.channels()) + " vs decoder " +
                        std::to_string(decoder.channels()));
    }
  } else {
    if (params.embed_dim != config.embed_dim ||
        params.decoder_channels != decoder.channels() ||
        params.encoder_channels != encoder.channels() ||
        params.p_x.size() !=
            static_cast<size_t>(params.embed_dim) * params.decoder_channels ||
        params.p_y.size() !=
            static_cast<size_t>(params.embed_dim) * params.encoder_channels) {
      throw ConfigError("params (d=" + std::to_string(params.embed_dim) +
                        ", C_dec=" + std::to_string(params.decoder_channels) +
                        ", C_enc=" + std::to_string(params.encoder_channels) +
                        ") do not match config d=" +
                        std::to_string(config.embed_dim) + ", decoder " +
                        decoder.shape_string() + ", encoder " +
                        encoder.shape_string());
    }
    if (config.similarity == SimilarityKind::kGatedBilinear &&
        params.gate_w.size() != static_cast<size_t>(decoder.channels())) {
      throw ConfigError("gate projection length " +
                        std::to_string(params.gate_w.size()) +
                        " does not match decoder channels " +
                        std::to_string(decoder.channels()));
    }
  }
}

// Everything the score loop needs, precomputed per pixel: layer-normed
// maps, embedded maps (non-inner), gate map (gated).
template <typename T>
struct KernelGenPlan {
  Tensor<T> x_ln, y_ln;      // layer-normed decoder / encoder
  Tensor<T> x_emb, y_emb;    // P_x x_ln / P_y y_ln, (.., d)
  Tensor<T> gate_map;        // (H, W, 1) of sigmoid gates
  Tensor<T> x_inv_s, y_inv_s;  // per-pixel 1/sqrt(var+eps), for backward
};

template <typename T>
KernelGenPlan<T> build_plan(const Tensor<T>& encoder, const Tensor<T>& decoder,
                            const SapaParams<T>& params,
                            const UpsamplerConfig& config, int threads,
                            MacCounter* macs, bool keep_stats) {
  KernelGenPlan<T> plan;
  const T eps = params.layernorm_eps;
  plan.x_ln = layer_norm_map(decoder, eps, keep_stats ? &plan.x_inv_s : nullptr,
                             threads);
  plan.y_ln = layer_norm_map(encoder, eps, keep_stats ? &plan.y_inv_s : nullptr,
                             threads);

  if (config.similarity != SimilarityKind::kInner) {
    const int d = params.embed_dim;
    plan.x_emb = Tensor<T>(decoder.height(), decoder.width(), d);
    plan.y_emb = Tensor<T>(encoder.height(), encoder.width(), d);
    parallel_for(decoder.height(), threads, [&](int r0, int r1) {
      for (int i = r0; i < r1; ++i) {
        for (int j = 0; j < decoder.width(); ++j) {
          matvec(params.p_x.data(), plan.x_ln.vec(i, j), d,
                 decoder.channels(), plan.x_emb.vec(i, j));
        }
      }
    });
    parallel_for(encoder.height(), threads, [&](int r0, int r1) {
      for (int i = r0; i < r1; ++i) {
        for (int j = 0; j < encoder.width(); ++j) {
          matvec(params.p_y.data(), plan.y_ln.vec(i, j), d,
                 encoder.channels(), plan.y_emb.vec(i, j));
        }
      }
    });
    if (macs) {
      macs->embedding +=
          static_cast<uint64_t>(decoder.size()) * d +
          static_cast<uint64_t>(encoder.size()) * d;
    }
  }

  if (config.similarity == SimilarityKind::kGatedBilinear) {
    plan.gate_map = Tensor<T>(decoder.height(), decoder.width(), 1);
    for (int i = 0; i < decoder.height(); ++i) {
      for (int j = 0; j < decoder.width(); ++j) {
        const T z = dot(params.gate_w.data(), plan.x_ln.vec(i, j),
                        decoder.channels()) +
                    params.gate_bias;
        plan.gate_map(i, j, 0) = sigmoid(z);
      }
    }
    if (macs) macs->gating += static_cast<uint64_t>(decoder.size());
  }
  return plan;
}

}  // namespace detail

// Builds the kernel field: for every output point l', scores the encoder
// vector at l' against the K x K decoder window centered at l = floor(l'/r)
// (clamp-to-edge borders) and normalizes the window of scores. Pure and
// deterministic; parallel over output rows with bitwise-identical results
// for any thread count. When macs is non-null the run is single-threaded
// and tallies multiply-adds per stage.
template <typename T>
KernelField<T> generate_kernels(const Tensor<T>& encoder,
                                const Tensor<T>& decoder,
                                const SapaParams<T>& params,
                                const UpsamplerConfig& config, int threads = 1,
                                MacCounter* macs = nullptr) {
  detail::validate_kernel_gen(encoder, decoder, params, config);
  if (macs) threads = 1;

  const int out_h = encoder.height();
  const int out_w = encoder.width();
  const int ratio = config.ratio;
  const WindowIndex win(config.kernel_size);
  const int k2 = win.count();

  detail::KernelGenPlan<T> plan = detail::build_plan(
      encoder, decoder, params, config, threads, macs, /*keep_stats=*/false);

  const bool inner = config.similarity == SimilarityKind::kInner;
  const bool gated = config.similarity == SimilarityKind::kGatedBilinear;
  const Tensor<T>& x_base = inner ? plan.x_ln : plan.x_emb;
  const int dq = inner ? decoder.channels() : params.embed_dim;

  KernelField<T> field(out_h, out_w, config.kernel_size);

  parallel_for(out_h, threads, [&](int r0, int r1) {
    std::vector<T> query(dq);
    std::vector<T> scores(k2);
    for (int oi = r0; oi < r1; ++oi) {
      const int li = oi / ratio;
      for (int oj = 0; oj < out_w; ++oj) {
        const int lj = oj / ratio;

        const T* q;
        if (inner) {
          q = plan.y_ln.vec(oi, oj);
        } else if (!gated) {
          q = plan.y_emb.vec(oi, oj);
        } else {
          const T g = plan.gate_map(li, lj, 0);
          const T* ye = plan.y_emb.vec(oi, oj);
          const T* xc = plan.x_emb.vec(li, lj);
          for (int j = 0; j < dq; ++j) {
            query[j] = g * ye[j] + (T(1) - g) * xc[j];
          }
          q = query.data();
        }

        for (int p = 0; p < k2; ++p) {
          const auto [du, dv] = win.offset(p);
          const int ci = clamp_index(li + du, decoder.height());
          const int cj = clamp_index(lj + dv, decoder.width());
          scores[p] = detail::dot(x_base.vec(ci, cj), q, dq);
        }
        normalize_window(std::span<const T>(scores),
                         std::span<T>(field.window(oi, oj), k2), config.norm);
      }
    }
  });

  if (macs) {
    const uint64_t points = static_cast<uint64_t>(out_h) * out_w;
    macs->similarity += points * k2 * dq;
    if (gated) macs->gating += points * 2 * dq;
  }
  return field;
}

}  // namespace sapa
