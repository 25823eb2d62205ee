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
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sapa/errors.hpp"

namespace sapa {

// Dense rank-3 feature map, laid out row-major as (row, col, channel) so
// that channel vectors are contiguous. Single sample; a batch is a loop
// over independent tensors. Library operations never mutate their inputs,
// so a constructed tensor is safe to share read-only across threads.
template <typename T>
class Tensor {
 public:
  Tensor() = default;

  // Zero-initialized tensor. Dimensions must be positive.
  Tensor(int height, int width, int channels)
      : h_(height), w_(width), c_(channels) {
    if (height <= 0 || width <= 0 || channels <= 0) {
      throw ConfigError("tensor dims must be positive, got " +
                        shape_string(height, width, channels));
    }
    data_.assign(static_cast<size_t>(h_) * w_ * c_, T(0));
  }

  static Tensor from_data(int height, int width, int channels,
                          std::vector<T> values) {
    Tensor t(height, width, channels);
    if (values.size() != t.size()) {
      throw ConfigError("tensor data length " + std::to_string(values.size()) +
                        " does not match dims " +
                        shape_string(height, width, channels));
    }
    t.data_ = std::move(values);
    return t;
  }

  int height() const { return h_; }
  int width() const { return w_; }
  int channels() const { return c_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  // Bounds-checked element access.
  T get(int row, int col, int ch) const {
    check_index(row, col, ch);
    return data_[offset(row, col, ch)];
  }

  void set(int row, int col, int ch, T value) {
    check_index(row, col, ch);
    data_[offset(row, col, ch)] = value;
  }

  // Unchecked access for validated hot loops.
  T operator()(int row, int col, int ch) const {
    return data_[offset(row, col, ch)];
  }
  T& operator()(int row, int col, int ch) {
    return data_[offset(row, col, ch)];
  }

  // Contiguous channel vector at a spatial location.
  const T* vec(int row, int col) const {
    return data_.data() + offset(row, col, 0);
  }
  T* vec(int row, int col) { return data_.data() + offset(row, col, 0); }

  std::span<const T> vec_span(int row, int col) const {
    check_index(row, col, 0);
    return {vec(row, col), static_cast<size_t>(c_)};
  }

  const std::vector<T>& data() const { return data_; }
  std::vector<T>& data() { return data_; }

  void fill(T value) { data_.assign(data_.size(), value); }

  bool same_shape(const Tensor& other) const {
    return h_ == other.h_ && w_ == other.w_ && c_ == other.c_;
  }

  bool all_finite() const {
    for (const T& v : data_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  std::string shape_string() const { return shape_string(h_, w_, c_); }

  static std::string shape_string(int h, int w, int c) {
    return std::to_string(h) + "x" + std::to_string(w) + "x" +
           std::to_string(c);
  }

 private:
  size_t offset(int row, int col, int ch) const {
    return (static_cast<size_t>(row) * w_ + col) * c_ + ch;
  }

  void check_index(int row, int col, int ch) const {
    if (row < 0 || row >= h_ || col < 0 || col >= w_ || ch < 0 || ch >= c_) {
      throw IndexError("index (" + std::to_string(row) + ", " +
                       std::to_string(col) + ", " + std::to_string(ch) +
                       ") out of range for tensor " + shape_string());
    }
  }

  int h_ = 0, w_ = 0, c_ = 0;
  std::vector<T> data_;
};

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;

template <typename To, typename From>
Tensor<To> tensor_cast(const Tensor<From>& t) {
  std::vector<To> out(t.size());
  const auto& src = t.data();
  for (size_t i = 0; i < src.size(); ++i) out[i] = static_cast<To>(src[i]);
  return Tensor<To>::from_data(t.height(), t.width(), t.channels(),
                               std::move(out));
}

inline int clamp_index(int i, int n) {
  return i < 0 ? 0 : (i >= n ? n - 1 : i);
}

// K x K offset set around a window center. Offsets run (u, v) with
// u, v in [-radius, radius], row-major, so index i maps to
// (i / k - radius, i % k - radius). K must be odd so the window has a
// center; |offsets| = K^2.
struct WindowIndex {
  int k = 0;
  int radius = 0;

  explicit WindowIndex(int kernel_size) : k(kernel_size), radius(kernel_size / 2) {
    if (kernel_size < 1 || kernel_size % 2 == 0) {
      throw ConfigError("kernel size must be odd and positive, got " +
                        std::to_string(kernel_size));
    }
  }

  int count() const { return k * k; }

  std::pair<int, int> offset(int i) const {
    return {i / k - radius, i % k - radius};
  }
};

// Decoder location feeding an output point: floor division by the upscale
// ratio, per the spatial location correspondence of x{ratio} upsampling.
inline std::pair<int, int> project_location(int row, int col, int ratio) {
  if (ratio < 1) {
    throw ConfigError("upscale ratio must be >= 1, got " +
                      std::to_string(ratio));
  }
  return {row / ratio, col / ratio};
}

// Channel vector at center + offset with clamp-to-edge (replicate) border
// policy. The center must be in bounds; the offset may reach outside.
template <typename T>
std::span<const T> window_vector(const Tensor<T>& t, int center_row,
                                 int center_col, int du, int dv) {
  if (center_row < 0 || center_row >= t.height() || center_col < 0 ||
      center_col >= t.width()) {
    throw IndexError("window center (" + std::to_string(center_row) + ", " +
                     std::to_string(center_col) + ") out of range for tensor " +
                     t.shape_string());
  }
  const int r = clamp_index(center_row + du, t.height());
  const int c = clamp_index(center_col + dv, t.width());
  return {t.vec(r, c), static_cast<size_t>(t.channels())};
}

}  // namespace sapa
