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

#include "sapa/kernel_map.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace sapa {

GrayImage kernel_map_image(const KernelField<float>& field, int du, int dv) {
  const int radius = field.k / 2;
  if (du < -radius || du > radius || dv < -radius || dv > radius) {
    throw ConfigError("kernel map offset (" + std::to_string(du) + ", " +
                      std::to_string(dv) + ") outside window radius " +
                      std::to_string(radius));
  }
  const int index = (du + radius) * field.k + (dv + radius);

  GrayImage img;
  img.width = field.out_width;
  img.height = field.out_height;
  img.pixels.resize(static_cast<size_t>(img.width) * img.height);

  float lo = field.window(0, 0)[index];
  float hi = lo;
  for (int i = 0; i < field.out_height; ++i) {
    for (int j = 0; j < field.out_width; ++j) {
      const float v = field.window(i, j)[index];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }

  const float range = hi - lo;
  for (int i = 0; i < field.out_height; ++i) {
    for (int j = 0; j < field.out_width; ++j) {
      const float v = field.window(i, j)[index];
      uint8_t pixel = 128;  // min == max convention
      if (range > 0.0f) {
        pixel = static_cast<uint8_t>(
            std::lround(255.0f * (v - lo) / range));
      }
      img.pixels[static_cast<size_t>(i) * img.width + j] = pixel;
    }
  }
  return img;
}

void write_pgm(const GrayImage& image, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(path + ": cannot open for writing");
  out << "P5\n" << image.width << " " << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
  if (!out) throw FormatError(path + ": write failed");
}

}  // namespace sapa
