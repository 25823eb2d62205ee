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

#include "sapa/config.hpp"

#include <algorithm>

namespace sapa {

const char* to_string(SimilarityKind kind) {
  switch (kind) {
    case SimilarityKind::kInner:
      return "inner";
    case SimilarityKind::kBilinear:
      return "bilinear";
    case SimilarityKind::kGatedBilinear:
      return "gated";
  }
  return "?";
}

const char* to_string(NormKind kind) {
  switch (kind) {
    case NormKind::kExp:
      return "exp";
    case NormKind::kRelu:
      return "relu";
    case NormKind::kSigmoid:
      return "sigmoid";
    case NormKind::kSoftplus:
      return "softplus";
    case NormKind::kNone:
      return "none";
  }
  return "?";
}

SimilarityKind similarity_from_string(const std::string& name) {
  if (name == "inner") return SimilarityKind::kInner;
  if (name == "bilinear") return SimilarityKind::kBilinear;
  if (name == "gated") return SimilarityKind::kGatedBilinear;
  throw ConfigError("unknown similarity kind '" + name +
                    "' (expected inner|bilinear|gated)");
}

NormKind norm_from_string(const std::string& name) {
  if (name == "exp") return NormKind::kExp;
  if (name == "relu") return NormKind::kRelu;
  if (name == "sigmoid") return NormKind::kSigmoid;
  if (name == "softplus") return NormKind::kSoftplus;
  if (name == "none") return NormKind::kNone;
  throw ConfigError("unknown norm kind '" + name +
                    "' (expected exp|relu|sigmoid|softplus|none)");
}

void UpsamplerConfig::validate() const {
  if (kernel_size < 1 || kernel_size % 2 == 0) {
    throw ConfigError("kernel size must be odd and positive, got " +
                      std::to_string(kernel_size));
  }
  if (embed_dim < 1) {
    throw ConfigError("embed dim must be positive, got " +
                      std::to_string(embed_dim));
  }
  if (ratio < 1) {
    throw ConfigError("upscale ratio must be >= 1, got " +
                      std::to_string(ratio));
  }
}

std::vector<std::string> config_warnings(const UpsamplerConfig& config,
                                         int decoder_channels,
                                         int encoder_channels) {
  std::vector<std::string> warnings;
  if (config.similarity != SimilarityKind::kInner) {
    const int c = std::min(decoder_channels, encoder_channels);
    if (config.embed_dim > c) {
      warnings.push_back("embed dim " + std::to_string(config.embed_dim) +
                         " exceeds channel count " + std::to_string(c) +
                         "; the projections are meant to be low-rank (d <= C)");
    }
  }
  return warnings;
}

}  // namespace sapa
