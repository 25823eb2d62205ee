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

#include <algorithm>
#include <thread>
#include <vector>

namespace sapa {

// Runs fn(begin, end) over contiguous chunks of [0, count). Chunks are
// disjoint and statically partitioned; each index is processed by exactly
// one thread, so per-index results do not depend on the thread count.
template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  if (count <= 0) return;
  const int n = std::max(1, std::min(threads, count));
  if (n == 1) {
    fn(0, count);
    return;
  }
  const int chunk = (count + n - 1) / n;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(n));
  for (int t = 1; t < n; ++t) {
    const int b = t * chunk;
    const int e = std::min(count, b + chunk);
    if (b < e) pool.emplace_back([&fn, b, e] { fn(b, e); });
  }
  fn(0, std::min(chunk, count));
  for (auto& th : pool) th.join();
}

}  // namespace sapa
