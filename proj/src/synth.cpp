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

#include "sapa/synth.hpp"

#include "sapa/rng.hpp"

namespace sapa {

TwoClusterFixture make_two_cluster_fixture(int height, int width, int channels,
                                           int ratio, uint64_t seed,
                                           float noise) {
  if (height < 1 || width < 2 || channels < 1 || ratio < 1) {
    throw ConfigError("two-cluster fixture needs height>=1, width>=2, "
                      "channels>=1, ratio>=1");
  }
  Rng rng(seed);
  TwoClusterFixture fx;
  fx.seam_col = width / 2;
  fx.left_value.resize(static_cast<size_t>(channels));
  fx.right_value.resize(static_cast<size_t>(channels));
  for (float& v : fx.left_value) v = static_cast<float>(rng.uniform(-1.0, 1.0));
  for (float& v : fx.right_value) {
    v = static_cast<float>(rng.uniform(-1.0, 1.0));
  }

  fx.decoder = Tensor<float>(height, width, channels);
  for (int i = 0; i < height; ++i) {
    for (int j = 0; j < width; ++j) {
      const auto& value = j < fx.seam_col ? fx.left_value : fx.right_value;
      float* dst = fx.decoder.vec(i, j);
      for (int ch = 0; ch < channels; ++ch) dst[ch] = value[static_cast<size_t>(ch)];
    }
  }

  const int enc_seam = ratio * fx.seam_col;
  fx.encoder = Tensor<float>(ratio * height, ratio * width, channels);
  for (int i = 0; i < fx.encoder.height(); ++i) {
    for (int j = 0; j < fx.encoder.width(); ++j) {
      const auto& value = j < enc_seam ? fx.left_value : fx.right_value;
      float* dst = fx.encoder.vec(i, j);
      for (int ch = 0; ch < channels; ++ch) {
        dst[ch] = value[static_cast<size_t>(ch)] +
                  static_cast<float>(rng.uniform(-noise, noise));
      }
    }
  }
  return fx;
}

}  // namespace sapa
