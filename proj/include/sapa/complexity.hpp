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

#include "sapa/macs.hpp"
#include "sapa/upsampler.hpp"

namespace sapa {

// Dynamic upsampling operators covered by the closed-form cost model.
enum class OperatorKind {
  kCarafe,
  kIndexNetHin,
  kIndexNetM2O,
  kA2U,
  kSapaInner,
  kSapaBilinear,
  kSapaGated,
};

const char* to_string(OperatorKind kind);
OperatorKind operator_from_string(const std::string& name);

struct CostStage {
  std::string name;
  uint64_t flops = 0;   // multiply-adds per decoder pixel
  uint64_t params = 0;
};

// Closed-form per-pixel cost of one operator at x2 upsampling. All numbers
// are exact integers; flops_per_pixel and params are the stage sums. A FLOP
// is one multiply-add.
struct CostReport {
  OperatorKind kind;
  std::string name;
  int channels = 0;
  int embed_dim = 0;
  int kernel_size = 0;
  std::vector<CostStage> stages;
  uint64_t flops_per_pixel = 0;
  uint64_t params = 0;
  // Params as built here: the gated variant carries one extra bias scalar
  // on top of the published 2Cd + C count. Equal to `params` elsewhere.
  uint64_t params_implemented = 0;
  // The gated variant's published per-stage gating constant is C + 8d while
  // its published total implies C + 5d; the stage table above uses C + 5d so
  // the stages sum to the total, and this field carries the alternative.
  // Zero for every other operator.
  uint64_t gating_stage_alt_flops = 0;
};

// Evaluates the cost polynomial of the requested operator at channel count
// C, embedding dim d, and kernel size K. SAPA-I ignores d (its embedding is
// the channel space itself). Throws ConfigError on nonpositive arguments.
CostReport cost(OperatorKind kind, int channels, int embed_dim,
                int kernel_size);

// Multiply-adds actually executed by one forward pass, by stage, plus the
// per-decoder-pixel average for comparison against cost().
struct MacReport {
  MacCounter macs;
  uint64_t decoder_pixels = 0;
  double per_pixel = 0.0;
};

template <typename T>
MacReport measure_sapa(const Tensor<T>& encoder, const Tensor<T>& decoder,
                       const SapaParams<T>& params,
                       const UpsamplerConfig& config) {
  MacReport report;
  sapa_forward(encoder, decoder, params, config, /*threads=*/1, &report.macs);
  report.decoder_pixels =
      static_cast<uint64_t>(decoder.height()) * decoder.width();
  report.per_pixel = static_cast<double>(report.macs.total()) /
                     static_cast<double>(report.decoder_pixels);
  return report;
}

}  // namespace sapa
