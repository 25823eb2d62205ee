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

#include <cmath>

#include "doctest.h"
#include "sapa/complexity.hpp"
#include "test_util.hpp"

using sapa::cost;
using sapa::CostReport;
using sapa::OperatorKind;
using sapa::SapaParams;
using sapa::SimilarityKind;
using sapa::Tensor;
using sapa::UpsamplerConfig;

TEST_CASE("cost reproduces the published 256-channel magnitudes") {
  CHECK(cost(OperatorKind::kCarafe, 256, 64, 5).flops_per_pixel == 99584);
  CHECK(cost(OperatorKind::kIndexNetHin, 256, 1, 1).flops_per_pixel == 2100224);
  CHECK(cost(OperatorKind::kA2U, 256, 1, 3).flops_per_pixel == 27940);
  CHECK(cost(OperatorKind::kSapaBilinear, 256, 32, 5).flops_per_pixel == 69760);
  CHECK(cost(OperatorKind::kSapaBilinear, 256, 32, 5).params == 16384);
  CHECK(cost(OperatorKind::kSapaInner, 256, 32, 5).params == 0);
}

TEST_CASE("totals equal the sum of their stages for every operator") {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    sapa::Rng rng(seed);
    const int c = 1 + static_cast<int>(rng.next_u64() % 512);
    const int d = 1 + static_cast<int>(rng.next_u64() % 128);
    const int k = 1 + 2 * static_cast<int>(rng.next_u64() % 4);
    for (const OperatorKind kind :
         {OperatorKind::kCarafe, OperatorKind::kIndexNetHin,
          OperatorKind::kIndexNetM2O, OperatorKind::kA2U,
          OperatorKind::kSapaInner, OperatorKind::kSapaBilinear,
          OperatorKind::kSapaGated}) {
      const CostReport r = cost(kind, c, d, k);
      uint64_t flops = 0, params = 0;
      for (const auto& s : r.stages) {
        flops += s.flops;
        params += s.params;
      }
      REQUIRE(r.flops_per_pixel == flops);
      REQUIRE(r.params == params);
    }
    // SAPA-I never carries parameters.
    REQUIRE(cost(OperatorKind::kSapaInner, c, d, k).params == 0);
    REQUIRE(cost(OperatorKind::kSapaInner, c, d, k).params_implemented == 0);
    REQUIRE(cost(OperatorKind::kSapaInner, c, d, k).flops_per_pixel ==
            8ull * k * k * c);
  }
}

TEST_CASE("the gated variant differs from bilinear by exactly C+5d and C") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    sapa::Rng rng(seed);
    const uint64_t c = 1 + rng.next_u64() % 512;
    const uint64_t d = 1 + rng.next_u64() % 128;
    const int k = 1 + 2 * static_cast<int>(rng.next_u64() % 4);
    const CostReport b = cost(OperatorKind::kSapaBilinear, static_cast<int>(c),
                              static_cast<int>(d), k);
    const CostReport g = cost(OperatorKind::kSapaGated, static_cast<int>(c),
                              static_cast<int>(d), k);
    REQUIRE(g.flops_per_pixel - b.flops_per_pixel == c + 5 * d);
    REQUIRE(g.params - b.params == c);
    REQUIRE(g.params_implemented - b.params_implemented == c + 1);
    REQUIRE(g.gating_stage_alt_flops == c + 8 * d);
    REQUIRE(b.gating_stage_alt_flops == 0);
  }
}

TEST_CASE("cost rejects bad arguments and unknown operator names") {
  CHECK_THROWS_AS(cost(OperatorKind::kCarafe, 0, 1, 1), sapa::ConfigError);
  CHECK_THROWS_AS(cost(OperatorKind::kCarafe, 1, -1, 1), sapa::ConfigError);
  CHECK_THROWS_AS(sapa::operator_from_string("deconv"), sapa::ConfigError);
  CHECK(sapa::operator_from_string("sapa-b") == OperatorKind::kSapaBilinear);
  CHECK(sapa::operator_from_string(sapa::to_string(OperatorKind::kA2U)) ==
        OperatorKind::kA2U);
}

TEST_CASE("measured multiply-adds match the cost model") {
  SUBCASE("K=1 inner: exactly 8C per decoder pixel") {
    const int c = 8;
    const auto decoder = test_util::random_tensor<float>(8, 8, c, 1);
    const auto encoder = test_util::random_tensor<float>(16, 16, c, 2);
    UpsamplerConfig cfg;
    cfg.similarity = SimilarityKind::kInner;
    cfg.kernel_size = 1;
    const auto report =
        sapa::measure_sapa(encoder, decoder, SapaParams<float>(), cfg);
    CHECK(report.macs.total() == 64ull * 8 * c);
    CHECK(report.per_pixel == doctest::Approx(8.0 * c));
    CHECK(report.per_pixel ==
          doctest::Approx(static_cast<double>(
              cost(OperatorKind::kSapaInner, c, c, 1).flops_per_pixel)));
  }

  SUBCASE("SAPA-B on 32x32x64: within 5% of the formula (exact here)") {
    const int c = 64, d = 32, k = 5;
    const auto decoder = test_util::random_tensor<float>(32, 32, c, 3);
    const auto encoder = test_util::random_tensor<float>(64, 64, c, 4);
    const auto params = SapaParams<float>::seeded(c, c, d, 5);
    UpsamplerConfig cfg;
    cfg.similarity = SimilarityKind::kBilinear;
    cfg.kernel_size = k;
    cfg.embed_dim = d;
    const auto report = sapa::measure_sapa(encoder, decoder, params, cfg);
    const double formula = static_cast<double>(
        cost(OperatorKind::kSapaBilinear, c, d, k).flops_per_pixel);
    CHECK(std::abs(report.per_pixel - formula) / formula < 0.05);
    CHECK(report.per_pixel == doctest::Approx(formula).epsilon(1e-9));
  }

  SUBCASE("the gated stage count uses the C+8d convention") {
    const int c = 16, d = 8, k = 3, h = 6, w = 7;
    const auto decoder = test_util::random_tensor<float>(h, w, c, 6);
    const auto encoder = test_util::random_tensor<float>(2 * h, 2 * w, c, 7);
    const auto params = SapaParams<float>::seeded(c, c, d, 8);
    UpsamplerConfig cfg;
    cfg.similarity = SimilarityKind::kGatedBilinear;
    cfg.kernel_size = k;
    cfg.embed_dim = d;
    const auto report = sapa::measure_sapa(encoder, decoder, params, cfg);
    const uint64_t pixels = static_cast<uint64_t>(h) * w;
    CHECK(report.macs.gating == pixels * c + 4 * pixels * 2 * d);
    CHECK(report.macs.embedding == pixels * c * d + 4 * pixels * c * d);
    CHECK(report.macs.similarity == 4 * pixels * k * k * d);
    CHECK(report.macs.assembly == 4 * pixels * k * k * c);
    // Still within the 5% contract against the published total.
    const double formula = static_cast<double>(
        cost(OperatorKind::kSapaGated, c, d, k).flops_per_pixel);
    CHECK(std::abs(report.per_pixel - formula) / formula < 0.05);
  }

  SUBCASE("doubling both spatial dims quadruples the total") {
    const int c = 4, d = 2;
    UpsamplerConfig cfg;
    cfg.similarity = SimilarityKind::kBilinear;
    cfg.kernel_size = 3;
    cfg.embed_dim = d;
    const auto params = SapaParams<float>::seeded(c, c, d, 9);
    const auto small = sapa::measure_sapa(
        test_util::random_tensor<float>(8, 8, c, 10),
        test_util::random_tensor<float>(4, 4, c, 11), params, cfg);
    const auto large = sapa::measure_sapa(
        test_util::random_tensor<float>(16, 16, c, 12),
        test_util::random_tensor<float>(8, 8, c, 13), params, cfg);
    CHECK(large.macs.total() == 4 * small.macs.total());
    CHECK(large.per_pixel == doctest::Approx(small.per_pixel));
  }
}
