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

#include "sapa/kernel_gen.hpp"

namespace sapa {

// Weighted-sum feature assembly: out[l'] = sum_p W[l',p] x[l+p] over the
// clamped decoder window at l = floor(l'/ratio). Parallel over output rows,
// bitwise-reproducible at any thread count.
template <typename T>
Tensor<T> assemble(const Tensor<T>& decoder, const KernelField<T>& kernels,
                   int ratio, int threads = 1, MacCounter* macs = nullptr) {
  if (ratio < 1) {
    throw ConfigError("upscale ratio must be >= 1, got " +
                      std::to_string(ratio));
  }
  if (kernels.out_height != ratio * decoder.height() ||
      kernels.out_width != ratio * decoder.width()) {
    throw ConfigError(
        "kernel field " + std::to_string(kernels.out_height) + "x" +
        std::to_string(kernels.out_width) + " does not match expected (" +
        std::to_string(ratio * decoder.height()) + ", " +
        std::to_string(ratio * decoder.width()) + ") = ratio " +
        std::to_string(ratio) + " x decoder " +
        std::to_string(decoder.height()) + "x" +
        std::to_string(decoder.width()));
  }
  const WindowIndex win(kernels.k);
  const int k2 = win.count();
  const int channels = decoder.channels();
  if (macs) threads = 1;

  Tensor<T> out(kernels.out_height, kernels.out_width, channels);
  parallel_for(kernels.out_height, threads, [&](int r0, int r1) {
    for (int oi = r0; oi < r1; ++oi) {
      const int li = oi / ratio;
      for (int oj = 0; oj < kernels.out_width; ++oj) {
        const int lj = oj / ratio;
        const T* w = kernels.window(oi, oj);
        T* dst = out.vec(oi, oj);
        for (int p = 0; p < k2; ++p) {
          const auto [du, dv] = win.offset(p);
          const int ci = clamp_index(li + du, decoder.height());
          const int cj = clamp_index(lj + dv, decoder.width());
          const T* src = decoder.vec(ci, cj);
          const T wp = w[p];
          for (int ch = 0; ch < channels; ++ch) dst[ch] += wp * src[ch];
        }
      }
    }
  });
  if (macs) {
    macs->assembly += static_cast<uint64_t>(kernels.out_height) *
                      kernels.out_width * k2 * channels;
  }
  return out;
}

template <typename T>
struct ForwardResult {
  Tensor<T> output;
  KernelField<T> kernels;
};

// End-to-end forward pass: kernel generation followed by feature assembly.
// Pure and deterministic; the kernel field is returned for inspection.
template <typename T>
ForwardResult<T> sapa_forward(const Tensor<T>& encoder,
                              const Tensor<T>& decoder,
                              const SapaParams<T>& params,
                              const UpsamplerConfig& config, int threads = 1,
                              MacCounter* macs = nullptr) {
  ForwardResult<T> result;
  result.kernels =
      generate_kernels(encoder, decoder, params, config, threads, macs);
  result.output =
      assemble(decoder, result.kernels, config.ratio, threads, macs);
  return result;
}

// out[l'] = t[floor(l'/ratio)].
template <typename T>
Tensor<T> upsample_nearest(const Tensor<T>& t, int ratio) {
  if (ratio < 1) {
    throw ConfigError("upscale ratio must be >= 1, got " +
                      std::to_string(ratio));
  }
  Tensor<T> out(ratio * t.height(), ratio * t.width(), t.channels());
  for (int oi = 0; oi < out.height(); ++oi) {
    for (int oj = 0; oj < out.width(); ++oj) {
      const T* src = t.vec(oi / ratio, oj / ratio);
      T* dst = out.vec(oi, oj);
      for (int ch = 0; ch < t.channels(); ++ch) dst[ch] = src[ch];
    }
  }
  return out;
}

namespace detail {

// Source coordinate and interpolation weight for one output index.
// Half-pixel centers: src = (dst + 0.5)/ratio - 0.5, clamped.
template <typename T>
void bilinear_source(int dst, int src_size, int ratio, bool align_corners,
                     int& i0, int& i1, T& w1) {
  T src;
  if (align_corners) {
    const int dst_size = src_size * ratio;
    src = dst_size == 1
              ? T(0)
              : static_cast<T>(dst) * static_cast<T>(src_size - 1) /
                    static_cast<T>(dst_size - 1);
  } else {
    src = (static_cast<T>(dst) + T(0.5)) / static_cast<T>(ratio) - T(0.5);
  }
  if (src < T(0)) src = T(0);
  const T max_src = static_cast<T>(src_size - 1);
  if (src > max_src) src = max_src;
  i0 = static_cast<int>(std::floor(src));
  i1 = std::min(i0 + 1, src_size - 1);
  w1 = src - static_cast<T>(i0);
}

}  // namespace detail

// Standard separable bilinear interpolation. align_corners=false (the
// default) uses half-pixel centers.
template <typename T>
Tensor<T> upsample_bilinear(const Tensor<T>& t, int ratio,
                            bool align_corners = false) {
  if (ratio < 1) {
    throw ConfigError("upscale ratio must be >= 1, got " +
                      std::to_string(ratio));
  }
  Tensor<T> out(ratio * t.height(), ratio * t.width(), t.channels());
  const int channels = t.channels();
  for (int oi = 0; oi < out.height(); ++oi) {
    int r0, r1;
    T wr;
    detail::bilinear_source(oi, t.height(), ratio, align_corners, r0, r1, wr);
    for (int oj = 0; oj < out.width(); ++oj) {
      int c0, c1;
      T wc;
      detail::bilinear_source(oj, t.width(), ratio, align_corners, c0, c1, wc);
      const T* v00 = t.vec(r0, c0);
      const T* v01 = t.vec(r0, c1);
      const T* v10 = t.vec(r1, c0);
      const T* v11 = t.vec(r1, c1);
      T* dst = out.vec(oi, oj);
      for (int ch = 0; ch < channels; ++ch) {
        const T top = (T(1) - wc) * v00[ch] + wc * v01[ch];
        const T bot = (T(1) - wc) * v10[ch] + wc * v11[ch];
        dst[ch] = (T(1) - wr) * top + wr * bot;
      }
    }
  }
  return out;
}

}  // namespace sapa
