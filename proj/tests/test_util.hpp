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

#include <cstdint>
#include <vector>

#include "sapa/rng.hpp"
#include "sapa/tensor.hpp"

namespace test_util {

template <typename T>
sapa::Tensor<T> random_tensor(int h, int w, int c, uint64_t seed, double lo = -1.0,
                              double hi = 1.0) {
  sapa::Rng rng(seed);
  sapa::Tensor<T> t(h, w, c);
  for (T& v : t.data()) v = static_cast<T>(rng.uniform(lo, hi));
  return t;
}

template <typename T>
sapa::Tensor<T> constant_tensor(int h, int w, const std::vector<T>& value) {
  sapa::Tensor<T> t(h, w, static_cast<int>(value.size()));
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      T* dst = t.vec(i, j);
      for (size_t ch = 0; ch < value.size(); ++ch) dst[ch] = value[ch];
    }
  }
  return t;
}

template <typename T>
std::vector<T> random_vector(int n, uint64_t seed, double lo = -1.0,
                             double hi = 1.0) {
  sapa::Rng rng(seed);
  std::vector<T> v(static_cast<size_t>(n));
  for (T& x : v) x = static_cast<T>(rng.uniform(lo, hi));
  return v;
}

}  // namespace test_util
