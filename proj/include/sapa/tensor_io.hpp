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

#include <string>

#include "sapa/tensor.hpp"

namespace sapa {

// SAPT v1 binary tensor format, little-endian throughout:
//
//   bytes 0..3   magic "SAPT"
//   bytes 4..7   u32 version, currently 1
//   bytes 8..19  u32 height, u32 width, u32 channels
//   bytes 20..   height * width * channels IEEE-754 f32 values, row-major
//                (row, col, channel)
//
// No padding, no checksum. Round trips are bit-exact for all finite values
// including negative zero. Read failures throw FormatError naming the
// offending byte offset.
Tensor<float> read_tensor(const std::string& path);
void write_tensor(const Tensor<float>& t, const std::string& path);

}  // namespace sapa
