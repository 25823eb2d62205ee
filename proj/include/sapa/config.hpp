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
#include <vector>

#include "sapa/errors.hpp"

namespace sapa {

// How an (encoder point, decoder window point) pair is scored.
enum class SimilarityKind {
  kInner,          // x . y; requires equal encoder/decoder channel counts
  kBilinear,       // (P_x x) . (P_y y), low-rank d x C projections
  kGatedBilinear,  // bilinear with a per-position gate blending the encoder
                   // embedding with the decoder's own embedding
};

// The h(x) family used to turn window scores into kernel weights,
// w_i = h(s_i) / sum_j h(s_j). Exp is exactly softmax.
enum class NormKind {
  kExp,       // default
  kRelu,
  kSigmoid,
  kSoftplus,
  kNone,      // raw scores, no sum-to-1 guarantee; ablation use only
};

const char* to_string(SimilarityKind kind);
const char* to_string(NormKind kind);
SimilarityKind similarity_from_string(const std::string& name);
NormKind norm_from_string(const std::string& name);

// Operator hyperparameters. Defaults are the standard SAPA settings:
// gated similarity, softmax normalization, K = 5, d = 32, x2 upsampling.
struct UpsamplerConfig {
  SimilarityKind similarity = SimilarityKind::kGatedBilinear;
  NormKind norm = NormKind::kExp;
  int kernel_size = 5;
  int embed_dim = 32;
  int ratio = 2;

  // Throws ConfigError on invalid values (even K, nonpositive dims, ...).
  void validate() const;
};

// Non-fatal configuration advice, e.g. embed_dim above the channel count
// (the projections are meant to be low-rank). Callers decide whether and
// where to surface these.
std::vector<std::string> config_warnings(const UpsamplerConfig& config,
                                         int decoder_channels,
                                         int encoder_channels);

}  // namespace sapa
