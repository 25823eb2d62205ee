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

// Test-only reference upsampler: a deliberately naive per-output-point loop
// kept independent of the production path. It takes different numerical
// routes on purpose -- similarity goes through dense C x C matrices instead
// of the d-vectors, softmax has no max subtraction, and LayerNorm is
// recomputed at every use instead of being precomputed per pixel.

#include <cmath>
#include <vector>

#include "sapa/config.hpp"
#include "sapa/similarity.hpp"
#include "sapa/tensor.hpp"

namespace reference {

inline std::vector<double> layer_norm(const double* v, int c, double eps) {
  double lo = v[0], hi = v[0];
  for (int i = 0; i < c; ++i) {
    lo = std::min(lo, v[i]);
    hi = std::max(hi, v[i]);
  }
  std::vector<double> out(static_cast<size_t>(c), 0.0);
  if (lo == hi) return out;  // constant vector convention: exact zeros
  double mean = 0.0;
  for (int i = 0; i < c; ++i) mean += v[i];
  mean /= c;
  double var = 0.0;
  for (int i = 0; i < c; ++i) var += (v[i] - mean) * (v[i] - mean);
  var /= c;
  const double scale = 1.0 / std::sqrt(var + eps);
  for (int i = 0; i < c; ++i) out[i] = (v[i] - mean) * scale;
  return out;
}

// x^T M y through the dense (c_x x c_y) matrix.
inline double dense_form(const std::vector<double>& x,
                         const std::vector<double>& m,
                         const std::vector<double>& y) {
  const size_t cy = y.size();
  double acc = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    double row = 0.0;
    for (size_t j = 0; j < cy; ++j) row += m[i * cy + j] * y[j];
    acc += x[i] * row;
  }
  return acc;
}

// M = A^T B for row-major (d x ca) A and (d x cb) B.
inline std::vector<double> dense_product(const std::vector<double>& a, int ca,
                                         const std::vector<double>& b, int cb,
                                         int d) {
  std::vector<double> m(static_cast<size_t>(ca) * cb, 0.0);
  for (int i = 0; i < ca; ++i) {
    for (int j = 0; j < cb; ++j) {
      double acc = 0.0;
      for (int r = 0; r < d; ++r) {
        acc += a[static_cast<size_t>(r) * ca + i] * b[static_cast<size_t>(r) * cb + j];
      }
      m[static_cast<size_t>(i) * cb + j] = acc;
    }
  }
  return m;
}

inline std::vector<double> normalize(const std::vector<double>& scores,
                                     sapa::NormKind kind) {
  const size_t n = scores.size();
  std::vector<double> h(n);
  switch (kind) {
    case sapa::NormKind::kExp:
      for (size_t i = 0; i < n; ++i) h[i] = std::exp(scores[i]);
      break;
    case sapa::NormKind::kRelu:
      for (size_t i = 0; i < n; ++i) h[i] = std::max(0.0, scores[i]);
      break;
    case sapa::NormKind::kSigmoid:
      for (size_t i = 0; i < n; ++i) h[i] = 1.0 / (1.0 + std::exp(-scores[i]));
      break;
    case sapa::NormKind::kSoftplus:
      for (size_t i = 0; i < n; ++i) h[i] = std::log(1.0 + std::exp(scores[i]));
      break;
    case sapa::NormKind::kNone:
      return scores;
  }
  double den = 0.0;
  for (size_t i = 0; i < n; ++i) den += h[i];
  if (kind == sapa::NormKind::kExp) {
    for (size_t i = 0; i < n; ++i) h[i] /= den;
    return h;
  }
  if (kind == sapa::NormKind::kRelu && den == 0.0) {
    for (size_t i = 0; i < n; ++i) h[i] = 1.0 / static_cast<double>(n);
    return h;
  }
  den += 1e-8;
  for (size_t i = 0; i < n; ++i) h[i] /= den;
  return h;
}

inline sapa::Tensor<double> forward(const sapa::Tensor<double>& encoder,
                                    const sapa::Tensor<double>& decoder,
                                    const sapa::SapaParams<double>& params,
                                    const sapa::UpsamplerConfig& config) {
  const int ratio = config.ratio;
  const int k = config.kernel_size;
  const int radius = k / 2;
  const int channels = decoder.channels();
  const double eps = params.layernorm_eps;
  const bool inner = config.similarity == sapa::SimilarityKind::kInner;
  const bool gated = config.similarity == sapa::SimilarityKind::kGatedBilinear;

  std::vector<double> a, b;  // P_x^T P_y and P_x^T P_x
  if (!inner) {
    a = dense_product(params.p_x, params.decoder_channels, params.p_y,
                      params.encoder_channels, params.embed_dim);
    b = dense_product(params.p_x, params.decoder_channels, params.p_x,
                      params.decoder_channels, params.embed_dim);
  }

  sapa::Tensor<double> out(encoder.height(), encoder.width(), channels);
  for (int oi = 0; oi < out.height(); ++oi) {
    for (int oj = 0; oj < out.width(); ++oj) {
      const int li = oi / ratio;
      const int lj = oj / ratio;
      const std::vector<double> y_ln =
          layer_norm(encoder.vec(oi, oj), encoder.channels(), eps);
      const std::vector<double> x_center_ln =
          layer_norm(decoder.vec(li, lj), channels, eps);
      double g = 0.0;
      if (gated) {
        double z = params.gate_bias;
        for (int ch = 0; ch < channels; ++ch) {
          z += params.gate_w[static_cast<size_t>(ch)] * x_center_ln[static_cast<size_t>(ch)];
        }
        g = 1.0 / (1.0 + std::exp(-z));
      }

      std::vector<double> scores;
      scores.reserve(static_cast<size_t>(k) * k);
      for (int du = -radius; du <= radius; ++du) {
        for (int dv = -radius; dv <= radius; ++dv) {
          const int ci = sapa::clamp_index(li + du, decoder.height());
          const int cj = sapa::clamp_index(lj + dv, decoder.width());
          const std::vector<double> x_ln =
              layer_norm(decoder.vec(ci, cj), channels, eps);
          double s;
          if (inner) {
            s = 0.0;
            for (int ch = 0; ch < channels; ++ch) {
              s += x_ln[static_cast<size_t>(ch)] * y_ln[static_cast<size_t>(ch)];
            }
          } else if (!gated) {
            s = dense_form(x_ln, a, y_ln);
          } else {
            s = g * dense_form(x_ln, a, y_ln) +
                (1.0 - g) * dense_form(x_ln, b, x_center_ln);
          }
          scores.push_back(s);
        }
      }

      const std::vector<double> weights = normalize(scores, config.norm);
      double* dst = out.vec(oi, oj);
      size_t p = 0;
      for (int du = -radius; du <= radius; ++du) {
        for (int dv = -radius; dv <= radius; ++dv, ++p) {
          const int ci = sapa::clamp_index(li + du, decoder.height());
          const int cj = sapa::clamp_index(lj + dv, decoder.width());
          const double* src = decoder.vec(ci, cj);
          for (int ch = 0; ch < channels; ++ch) dst[ch] += weights[p] * src[ch];
        }
      }
    }
  }
  return out;
}

}  // namespace reference
