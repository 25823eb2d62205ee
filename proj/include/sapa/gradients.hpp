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
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sapa/upsampler.hpp"

namespace sapa {

// Gradients of a scalar loss with respect to every input and parameter.
// Shapes mirror the forward inputs; projection gradients are row-major
// like the matrices themselves.
template <typename T>
struct GradBundle {
  Tensor<T> d_encoder;
  Tensor<T> d_decoder;
  std::vector<T> d_p_x;
  std::vector<T> d_p_y;
  std::vector<T> d_gate_w;
  T d_gate_bias = T(0);
};

namespace detail {

// LayerNorm backward for one vector given the normalized output x_hat and
// 1/sqrt(var + eps) from the forward pass.
template <typename T>
void layer_norm_backward(const T* x_hat, T inv_s, const T* d_out, int c,
                         T* d_in_accum) {
  T m1 = T(0), m2 = T(0);
  for (int i = 0; i < c; ++i) {
    m1 += d_out[i];
    m2 += d_out[i] * x_hat[i];
  }
  const T inv_c = T(1) / static_cast<T>(c);
  m1 *= inv_c;
  m2 *= inv_c;
  for (int i = 0; i < c; ++i) {
    d_in_accum[i] += inv_s * (d_out[i] - m1 - x_hat[i] * m2);
  }
}

}  // namespace detail

// Vector-Jacobian product through the full forward pass (assembly, softmax
// normalization, similarity, gating, projections, LayerNorm) for
// L = sum(d_output * forward_output). Exp normalization only; the window
// weights are recomputed exactly as in the forward pass and backpropagated
// with the softmax Jacobian diag(w) - w w^T per window. Accumulation runs
// serially in row-major output order, so results are reproducible.
template <typename T>
GradBundle<T> sapa_backward(const Tensor<T>& encoder, const Tensor<T>& decoder,
                            const SapaParams<T>& params,
                            const UpsamplerConfig& config,
                            const Tensor<T>& d_output) {
  detail::validate_kernel_gen(encoder, decoder, params, config);
  if (config.norm != NormKind::kExp) {
    throw ConfigError(std::string("sapa_backward supports norm=exp only, got ") +
                      to_string(config.norm));
  }
  if (d_output.height() != encoder.height() ||
      d_output.width() != encoder.width() ||
      d_output.channels() != decoder.channels()) {
    throw ConfigError("d_output " + d_output.shape_string() +
                      " does not match forward output " +
                      Tensor<T>::shape_string(encoder.height(), encoder.width(),
                                              decoder.channels()));
  }

  const int ratio = config.ratio;
  const WindowIndex win(config.kernel_size);
  const int k2 = win.count();
  const int channels = decoder.channels();
  const bool inner = config.similarity == SimilarityKind::kInner;
  const bool gated = config.similarity == SimilarityKind::kGatedBilinear;
  const int dq = inner ? channels : params.embed_dim;

  detail::KernelGenPlan<T> plan =
      detail::build_plan(encoder, decoder, params, config, /*threads=*/1,
                         /*macs=*/nullptr, /*keep_stats=*/true);
  const Tensor<T>& x_base = inner ? plan.x_ln : plan.x_emb;

  GradBundle<T> grads;
  grads.d_encoder = Tensor<T>(encoder.height(), encoder.width(),
                              encoder.channels());
  grads.d_decoder = Tensor<T>(decoder.height(), decoder.width(), channels);
  grads.d_p_x.assign(params.p_x.size(), T(0));
  grads.d_p_y.assign(params.p_y.size(), T(0));
  grads.d_gate_w.assign(params.gate_w.size(), T(0));

  Tensor<T> d_x_raw(decoder.height(), decoder.width(), channels);
  Tensor<T> d_x_ln(decoder.height(), decoder.width(), channels);
  Tensor<T> d_y_ln(encoder.height(), encoder.width(), encoder.channels());
  Tensor<T> d_x_emb, d_y_emb, d_gate;
  if (!inner) {
    d_x_emb = Tensor<T>(decoder.height(), decoder.width(), dq);
    d_y_emb = Tensor<T>(encoder.height(), encoder.width(), dq);
  }
  if (gated) d_gate = Tensor<T>(decoder.height(), decoder.width(), 1);

  std::vector<T> query(dq), d_query(dq), scores(k2), weights(k2), d_w(k2),
      d_s(k2);

  for (int oi = 0; oi < encoder.height(); ++oi) {
    const int li = oi / ratio;
    for (int oj = 0; oj < encoder.width(); ++oj) {
      const int lj = oj / ratio;

      // Recompute this window's query, scores, and weights.
      const T* q;
      T g = T(0);
      if (inner) {
        q = plan.y_ln.vec(oi, oj);
      } else if (!gated) {
        q = plan.y_emb.vec(oi, oj);
      } else {
        g = plan.gate_map(li, lj, 0);
        const T* ye = plan.y_emb.vec(oi, oj);
        const T* xc = plan.x_emb.vec(li, lj);
        for (int j = 0; j < dq; ++j) query[j] = g * ye[j] + (T(1) - g) * xc[j];
        q = query.data();
      }
      for (int p = 0; p < k2; ++p) {
        const auto [du, dv] = win.offset(p);
        const int ci = clamp_index(li + du, decoder.height());
        const int cj = clamp_index(lj + dv, decoder.width());
        scores[p] = detail::dot(x_base.vec(ci, cj), q, dq);
      }
      normalize_window(std::span<const T>(scores.data(), scores.size()),
                       std::span<T>(weights), NormKind::kExp);

      // Assembly backward: d_w and the raw-decoder scatter.
      const T* d_out = d_output.vec(oi, oj);
      for (int p = 0; p < k2; ++p) {
        const auto [du, dv] = win.offset(p);
        const int ci = clamp_index(li + du, decoder.height());
        const int cj = clamp_index(lj + dv, decoder.width());
        const T* src = decoder.vec(ci, cj);
        T* acc = d_x_raw.vec(ci, cj);
        T dw = T(0);
        const T wp = weights[p];
        for (int ch = 0; ch < channels; ++ch) {
          dw += d_out[ch] * src[ch];
          acc[ch] += wp * d_out[ch];
        }
        d_w[p] = dw;
      }

      // Softmax backward.
      T sdot = T(0);
      for (int p = 0; p < k2; ++p) sdot += weights[p] * d_w[p];
      for (int p = 0; p < k2; ++p) d_s[p] = weights[p] * (d_w[p] - sdot);

      // Score backward into the window vectors and the query.
      std::fill(d_query.begin(), d_query.end(), T(0));
      Tensor<T>& d_xbase = inner ? d_x_ln : d_x_emb;
      for (int p = 0; p < k2; ++p) {
        const auto [du, dv] = win.offset(p);
        const int ci = clamp_index(li + du, decoder.height());
        const int cj = clamp_index(lj + dv, decoder.width());
        T* acc = d_xbase.vec(ci, cj);
        const T* base = x_base.vec(ci, cj);
        const T dsp = d_s[p];
        for (int j = 0; j < dq; ++j) {
          acc[j] += dsp * q[j];
          d_query[j] += dsp * base[j];
        }
      }

      // Query backward.
      if (inner) {
        T* acc = d_y_ln.vec(oi, oj);
        for (int j = 0; j < dq; ++j) acc[j] += d_query[j];
      } else if (!gated) {
        T* acc = d_y_emb.vec(oi, oj);
        for (int j = 0; j < dq; ++j) acc[j] += d_query[j];
      } else {
        T* accy = d_y_emb.vec(oi, oj);
        T* accx = d_x_emb.vec(li, lj);
        const T* ye = plan.y_emb.vec(oi, oj);
        const T* xc = plan.x_emb.vec(li, lj);
        T dg = T(0);
        for (int j = 0; j < dq; ++j) {
          accy[j] += g * d_query[j];
          accx[j] += (T(1) - g) * d_query[j];
          dg += d_query[j] * (ye[j] - xc[j]);
        }
        d_gate(li, lj, 0) += dg;
      }
    }
  }

  // Gate backward: through the sigmoid and its linear projection.
  if (gated) {
    for (int i = 0; i < decoder.height(); ++i) {
      for (int j = 0; j < decoder.width(); ++j) {
        const T g = plan.gate_map(i, j, 0);
        const T dz = g * (T(1) - g) * d_gate(i, j, 0);
        const T* x_hat = plan.x_ln.vec(i, j);
        T* acc = d_x_ln.vec(i, j);
        for (int ch = 0; ch < channels; ++ch) {
          grads.d_gate_w[static_cast<size_t>(ch)] += dz * x_hat[ch];
          acc[ch] += dz * params.gate_w[static_cast<size_t>(ch)];
        }
        grads.d_gate_bias += dz;
      }
    }
  }

  // Projection backward: d_P += d_emb outer x_ln, d_x_ln += P^T d_emb.
  if (!inner) {
    for (int i = 0; i < decoder.height(); ++i) {
      for (int j = 0; j < decoder.width(); ++j) {
        const T* de = d_x_emb.vec(i, j);
        const T* x_hat = plan.x_ln.vec(i, j);
        T* acc = d_x_ln.vec(i, j);
        for (int r = 0; r < dq; ++r) {
          const T der = de[r];
          const T* row = params.p_x.data() + static_cast<size_t>(r) * channels;
          T* grow = grads.d_p_x.data() + static_cast<size_t>(r) * channels;
          for (int ch = 0; ch < channels; ++ch) {
            grow[ch] += der * x_hat[ch];
            acc[ch] += der * row[ch];
          }
        }
      }
    }
    const int ce = encoder.channels();
    for (int i = 0; i < encoder.height(); ++i) {
      for (int j = 0; j < encoder.width(); ++j) {
        const T* de = d_y_emb.vec(i, j);
        const T* y_hat = plan.y_ln.vec(i, j);
        T* acc = d_y_ln.vec(i, j);
        for (int r = 0; r < dq; ++r) {
          const T der = de[r];
          const T* row = params.p_y.data() + static_cast<size_t>(r) * ce;
          T* grow = grads.d_p_y.data() + static_cast<size_t>(r) * ce;
          for (int ch = 0; ch < ce; ++ch) {
            grow[ch] += der * y_hat[ch];
            acc[ch] += der * row[ch];
          }
        }
      }
    }
  }

  // LayerNorm backward into the raw features; the decoder also receives the
  // assembly-path gradient, which bypasses LayerNorm.
  for (int i = 0; i < decoder.height(); ++i) {
    for (int j = 0; j < decoder.width(); ++j) {
      T* acc = grads.d_decoder.vec(i, j);
      const T* draw = d_x_raw.vec(i, j);
      for (int ch = 0; ch < channels; ++ch) acc[ch] += draw[ch];
      detail::layer_norm_backward(plan.x_ln.vec(i, j), plan.x_inv_s(i, j, 0),
                                  d_x_ln.vec(i, j), channels, acc);
    }
  }
  for (int i = 0; i < encoder.height(); ++i) {
    for (int j = 0; j < encoder.width(); ++j) {
      detail::layer_norm_backward(plan.y_ln.vec(i, j), plan.y_inv_s(i, j, 0),
                                  d_y_ln.vec(i, j), encoder.channels(),
                                  grads.d_encoder.vec(i, j));
    }
  }
  return grads;
}

// Central finite differences of fn over a parameter vector:
// (fn(x + h e_i) - fn(x - h e_i)) / 2h per coordinate.
template <typename Fn>
std::vector<double> finite_diff(Fn&& fn, std::vector<double> at, double step) {
  if (step <= 0) throw ConfigError("finite_diff: step must be positive");
  std::vector<double> grad(at.size());
  for (size_t i = 0; i < at.size(); ++i) {
    const double x0 = at[i];
    at[i] = x0 + step;
    const double fp = fn(at);
    at[i] = x0 - step;
    const double fm = fn(at);
    at[i] = x0;
    grad[i] = (fp - fm) / (2.0 * step);
  }
  return grad;
}

// -- Gradcheck harness ------------------------------------------------------

struct GradcheckGroup {
  std::string name;
  double max_rel_error = 0.0;
};

struct GradcheckReport {
  std::vector<GradcheckGroup> groups;
  double max_rel_error = 0.0;

  bool passed(double tol) const { return max_rel_error < tol; }
};

namespace detail {

// Relative error with the denominator floored at atol/rtol, so that
// rel_error < rtol is exactly the standard combined check
// |a - b| < atol + rtol * max(|a|, |b|). Coordinates far below the floor
// are judged on absolute error; everything else on relative error. The
// floor absorbs the roundoff noise of the finite-difference oracle itself,
// which at step 1e-6 exceeds 1e-5 relative on near-zero gradients.
inline double rel_error(double a, double b, double atol, double rtol) {
  const double denom = std::max({std::abs(a), std::abs(b), atol / rtol});
  return std::abs(a - b) / denom;
}

}  // namespace detail

// Checks the analytic backward of one seeded random instance against
// central finite differences in double precision. All inputs and parameters
// are perturbed; the report carries the max floored relative error per
// group (1e-5 relative with a 1e-8 absolute floor by default; pass iff
// max_rel_error < rtol).
inline GradcheckReport gradcheck_instance(int height, int width, int channels,
                                          const UpsamplerConfig& config,
                                          uint64_t seed, double step = 1e-6,
                                          double atol = 1e-8,
                                          double rtol = 1e-5) {
  const int eh = config.ratio * height;
  const int ew = config.ratio * width;
  Rng rng(seed);
  Tensor<double> decoder(height, width, channels);
  for (double& v : decoder.data()) v = rng.uniform(-1.0, 1.0);
  Tensor<double> encoder(eh, ew, channels);
  for (double& v : encoder.data()) v = rng.uniform(-1.0, 1.0);
  SapaParams<double> params = SapaParams<double>::seeded(
      channels, channels, config.embed_dim, seed ^ 0x9e3779b97f4a7c15ull);
  Tensor<double> d_output(eh, ew, channels);
  for (double& v : d_output.data()) v = rng.uniform(-1.0, 1.0);

  // Pack order: decoder, encoder, p_x, p_y, gate_w, gate_bias.
  const bool inner = config.similarity == SimilarityKind::kInner;
  const bool gated = config.similarity == SimilarityKind::kGatedBilinear;
  std::vector<double> at;
  at.insert(at.end(), decoder.data().begin(), decoder.data().end());
  at.insert(at.end(), encoder.data().begin(), encoder.data().end());
  const size_t n_dec = decoder.size(), n_enc = encoder.size();
  size_t n_px = 0, n_py = 0, n_gw = 0, n_gb = 0;
  if (!inner) {
    at.insert(at.end(), params.p_x.begin(), params.p_x.end());
    at.insert(at.end(), params.p_y.begin(), params.p_y.end());
    n_px = params.p_x.size();
    n_py = params.p_y.size();
  }
  if (gated) {
    at.insert(at.end(), params.gate_w.begin(), params.gate_w.end());
    at.push_back(params.gate_bias);
    n_gw = params.gate_w.size();
    n_gb = 1;
  }

  const auto unpack_and_run = [&](const std::vector<double>& x) {
    Tensor<double> dec = decoder, enc = encoder;
    SapaParams<double> p = params;
    size_t off = 0;
    std::copy_n(x.begin() + off, n_dec, dec.data().begin());
    off += n_dec;
    std::copy_n(x.begin() + off, n_enc, enc.data().begin());
    off += n_enc;
    if (!inner) {
      std::copy_n(x.begin() + off, n_px, p.p_x.begin());
      off += n_px;
      std::copy_n(x.begin() + off, n_py, p.p_y.begin());
      off += n_py;
    }
    if (gated) {
      std::copy_n(x.begin() + off, n_gw, p.gate_w.begin());
      off += n_gw;
      p.gate_bias = x[off];
    }
    const Tensor<double> out = sapa_forward(enc, dec, p, config).output;
    double loss = 0.0;
    for (size_t i = 0; i < out.size(); ++i) {
      loss += out.data()[i] * d_output.data()[i];
    }
    return loss;
  };

  const std::vector<double> fd = finite_diff(unpack_and_run, at, step);
  const GradBundle<double> an =
      sapa_backward(encoder, decoder, params, config, d_output);

  std::vector<double> analytic;
  analytic.insert(analytic.end(), an.d_decoder.data().begin(),
                  an.d_decoder.data().end());
  analytic.insert(analytic.end(), an.d_encoder.data().begin(),
                  an.d_encoder.data().end());
  if (!inner) {
    analytic.insert(analytic.end(), an.d_p_x.begin(), an.d_p_x.end());
    analytic.insert(analytic.end(), an.d_p_y.begin(), an.d_p_y.end());
  }
  if (gated) {
    analytic.insert(analytic.end(), an.d_gate_w.begin(), an.d_gate_w.end());
    analytic.push_back(an.d_gate_bias);
  }

  GradcheckReport report;
  const auto add_group = [&](const std::string& name, size_t begin,
                             size_t count) {
    if (count == 0) return;
    GradcheckGroup group{name, 0.0};
    for (size_t i = begin; i < begin + count; ++i) {
      group.max_rel_error = std::max(
          group.max_rel_error,
          detail::rel_error(analytic[i], fd[i], atol, rtol));
    }
    report.groups.push_back(group);
    report.max_rel_error = std::max(report.max_rel_error, group.max_rel_error);
  };
  size_t off = 0;
  add_group("decoder", off, n_dec);
  off += n_dec;
  add_group("encoder", off, n_enc);
  off += n_enc;
  add_group("p_x", off, n_px);
  off += n_px;
  add_group("p_y", off, n_py);
  off += n_py;
  add_group("gate_w", off, n_gw);
  off += n_gw;
  add_group("gate_bias", off, n_gb);
  return report;
}

}  // namespace sapa
