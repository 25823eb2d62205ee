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

#include "sapa/complexity.hpp"

namespace sapa {

const char* to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::kCarafe:
      return "CARAFE";
    case OperatorKind::kIndexNetHin:
      return "IndexNet-HIN";
    case OperatorKind::kIndexNetM2O:
      return "IndexNet-M2O";
    case OperatorKind::kA2U:
      return "A2U";
    case OperatorKind::kSapaInner:
      return "SAPA-I";
    case OperatorKind::kSapaBilinear:
      return "SAPA-B";
    case OperatorKind::kSapaGated:
      return "SAPA-G";
  }
  return "?";
}

OperatorKind operator_from_string(const std::string& name) {
  if (name == "carafe" || name == "CARAFE") return OperatorKind::kCarafe;
  if (name == "indexnet-hin" || name == "IndexNet-HIN")
    return OperatorKind::kIndexNetHin;
  if (name == "indexnet-m2o" || name == "IndexNet-M2O")
    return OperatorKind::kIndexNetM2O;
  if (name == "a2u" || name == "A2U") return OperatorKind::kA2U;
  if (name == "sapa-i" || name == "SAPA-I") return OperatorKind::kSapaInner;
  if (name == "sapa-b" || name == "SAPA-B") return OperatorKind::kSapaBilinear;
  if (name == "sapa-g" || name == "SAPA-G") return OperatorKind::kSapaGated;
  throw ConfigError("unknown operator '" + name + "'");
}

CostReport cost(OperatorKind kind, int channels, int embed_dim,
                int kernel_size) {
  if (channels < 1 || embed_dim < 1 || kernel_size < 1) {
    throw ConfigError("cost: C, d, K must be positive (got C=" +
                      std::to_string(channels) + ", d=" +
                      std::to_string(embed_dim) + ", K=" +
                      std::to_string(kernel_size) + ")");
  }
  const uint64_t c = static_cast<uint64_t>(channels);
  const uint64_t d = static_cast<uint64_t>(embed_dim);
  const uint64_t k2 = static_cast<uint64_t>(kernel_size) * kernel_size;

  CostReport r;
  r.kind = kind;
  r.name = to_string(kind);
  r.channels = channels;
  r.embed_dim = embed_dim;
  r.kernel_size = kernel_size;

  switch (kind) {
    case OperatorKind::kCarafe:
      r.stages = {{"kernel generation", c * d + 36 * k2 * d, c * d + 36 * k2 * d},
                  {"feature assembly", 4 * k2 * c, 0}};
      break;
    case OperatorKind::kIndexNetHin:
      r.stages = {{"kernel generation", 32 * c * c + 8 * c, 32 * c * c + 8 * c},
                  {"feature assembly", 4 * c, 0}};
      break;
    case OperatorKind::kIndexNetM2O:
      r.stages = {{"kernel generation", 68 * c * c, 68 * c * c},
                  {"feature assembly", 4 * c, 0}};
      break;
    case OperatorKind::kA2U:
      r.stages = {{"kernel generation", 73 * c + 4 * k2, 4 * k2 * c + 2 * c},
                  {"feature assembly", 4 * k2 * c, 0}};
      break;
    case OperatorKind::kSapaInner:
      // d = C: the similarity runs in the raw channel space.
      r.embed_dim = channels;
      r.stages = {{"inner product", 4 * k2 * c, 0},
                  {"feature assembly", 4 * k2 * c, 0}};
      break;
    case OperatorKind::kSapaBilinear:
      r.stages = {{"feature embedding", 5 * c * d, 2 * c * d},
                  {"inner product", 4 * k2 * d, 0},
                  {"feature assembly", 4 * k2 * c, 0}};
      break;
    case OperatorKind::kSapaGated:
      r.stages = {{"feature embedding", 5 * c * d, 2 * c * d},
                  {"gated addition", c + 5 * d, c},
                  {"inner product", 4 * k2 * d, 0},
                  {"feature assembly", 4 * k2 * c, 0}};
      r.gating_stage_alt_flops = c + 8 * d;
      break;
  }

  for (const CostStage& stage : r.stages) {
    r.flops_per_pixel += stage.flops;
    r.params += stage.params;
  }
  r.params_implemented =
      r.params + (kind == OperatorKind::kSapaGated ? 1 : 0);  // gate bias
  return r;
}

}  // namespace sapa
