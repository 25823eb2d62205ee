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

#include "sapa/tensor.hpp"

namespace sapa {

// Two-cluster demo pair: the decoder is split into constant half-planes a
// (left) and b (right) along a vertical seam, and the encoder carries the
// same split at ratio x resolution plus small seeded noise. This is the
// standard fixture for boundary-behavior tests.
struct TwoClusterFixture {
  Tensor<float> decoder;           // (h, w, c)
  Tensor<float> encoder;           // (ratio*h, ratio*w, c)
  std::vector<float> left_value;   // a
  std::vector<float> right_value;  // b
  int seam_col = 0;                // first right-cluster decoder column
};

// Deterministic given the seed: a, b are uniform in (-1, 1), encoder noise
// is uniform in +-noise. width must be >= 2 so both clusters exist.
TwoClusterFixture make_two_cluster_fixture(int height, int width, int channels,
                                           int ratio, uint64_t seed,
                                           float noise = 0.01f);

}  // namespace sapa
