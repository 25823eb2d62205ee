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

namespace sapa {

// Multiply-add tally for the four costed pipeline stages. One unit is one
// multiply-add, the same convention the closed-form cost model uses.
// LayerNorm and the kernel normalizer are not tallied; the cost model does
// not price them either.
struct MacCounter {
  uint64_t embedding = 0;
  uint64_t gating = 0;
  uint64_t similarity = 0;
  uint64_t assembly = 0;

  uint64_t total() const { return embedding + gating + similarity + assembly; }
};

}  // namespace sapa
