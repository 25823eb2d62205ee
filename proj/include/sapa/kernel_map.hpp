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
#include <string>
#include <vector>

#include "sapa/kernel_gen.hpp"

namespace sapa {

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;  // row-major
};

// Image of one fixed-offset weight across all output points (e.g. the
// top-left weight at offset (-r, -r)), min-max normalized over the image.
// A constant field maps to mid-gray 128. The offset must lie inside the
// kernel window.
GrayImage kernel_map_image(const KernelField<float>& field, int du, int dv);

// Binary PGM ("P5"), 8-bit, maxval 255.
void write_pgm(const GrayImage& image, const std::string& path);

}  // namespace sapa
