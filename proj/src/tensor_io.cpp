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

#include "sapa/tensor_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <vector>

namespace sapa {
namespace {

constexpr char kMagic[4] = {'S', 'A', 'P', 'T'};
constexpr uint32_t kVersion = 1;
constexpr size_t kHeaderBytes = 20;
// 2^28 elements (1 GiB of f32) is far beyond any feature map this library
// targets; a larger header is treated as corruption.
constexpr uint64_t kMaxElements = uint64_t(1) << 28;

uint32_t load_u32_le(const unsigned char* b) {
  return uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 |
         uint32_t(b[3]) << 24;
}

void store_u32_le(uint32_t v, unsigned char* b) {
  b[0] = static_cast<unsigned char>(v);
  b[1] = static_cast<unsigned char>(v >> 8);
  b[2] = static_cast<unsigned char>(v >> 16);
  b[3] = static_cast<unsigned char>(v >> 24);
}

[[noreturn]] void fail(const std::string& path, const std::string& what,
                       size_t byte_offset) {
  throw FormatError(path + ": " + what + " (byte offset " +
                    std::to_string(byte_offset) + ")");
}

}  // namespace

Tensor<float> read_tensor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path + ": cannot open for reading");

  unsigned char header[kHeaderBytes];
  in.read(reinterpret_cast<char*>(header), kHeaderBytes);
  if (static_cast<size_t>(in.gcount()) < kHeaderBytes) {
    fail(path, "truncated header", static_cast<size_t>(in.gcount()));
  }
  if (std::memcmp(header, kMagic, 4) != 0) fail(path, "bad magic bytes", 0);
  const uint32_t version = load_u32_le(header + 4);
  if (version != kVersion) {
    fail(path, "unsupported version " + std::to_string(version), 4);
  }
  const uint32_t h = load_u32_le(header + 8);
  const uint32_t w = load_u32_le(header + 12);
  const uint32_t c = load_u32_le(header + 16);
  if (h == 0 || w == 0 || c == 0) fail(path, "zero dimension", 8);
  const uint64_t count = uint64_t(h) * w * c;
  if (count > kMaxElements) {
    fail(path, "dimension overflow: " + std::to_string(count) + " elements", 8);
  }

  const size_t payload_bytes = static_cast<size_t>(count) * 4;
  std::vector<unsigned char> payload(payload_bytes);
  in.read(reinterpret_cast<char*>(payload.data()), payload_bytes);
  const size_t got = static_cast<size_t>(in.gcount());
  if (got < payload_bytes) {
    fail(path,
         "truncated payload: expected " + std::to_string(payload_bytes) +
             " bytes, got " + std::to_string(got),
         kHeaderBytes + got);
  }

  std::vector<float> values(count);
  for (size_t i = 0; i < values.size(); ++i) {
    values[i] = std::bit_cast<float>(load_u32_le(payload.data() + i * 4));
  }
  return Tensor<float>::from_data(static_cast<int>(h), static_cast<int>(w),
                                  static_cast<int>(c), std::move(values));
}

void write_tensor(const Tensor<float>& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(path + ": cannot open for writing");

  unsigned char header[kHeaderBytes];
  std::memcpy(header, kMagic, 4);
  store_u32_le(kVersion, header + 4);
  store_u32_le(static_cast<uint32_t>(t.height()), header + 8);
  store_u32_le(static_cast<uint32_t>(t.width()), header + 12);
  store_u32_le(static_cast<uint32_t>(t.channels()), header + 16);
  out.write(reinterpret_cast<const char*>(header), kHeaderBytes);

  std::vector<unsigned char> payload(t.size() * 4);
  const auto& values = t.data();
  for (size_t i = 0; i < values.size(); ++i) {
    store_u32_le(std::bit_cast<uint32_t>(values[i]), payload.data() + i * 4);
  }
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
  if (!out) throw FormatError(path + ": write failed");
}

}  // namespace sapa
