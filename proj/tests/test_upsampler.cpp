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
#include <cstring>
#include <span>
#include <vector>

#include "doctest.h"
#include "reference_upsampler.hpp"
#include "sapa/upsampler.hpp"
#include "test_util.hpp"

using sapa::KernelField;
using sapa::NormKind;
using sapa::SapaParams;
using sapa::SimilarityKind;
using sapa::Tensor;
using sapa::UpsamplerConfig;

namespace {

// Random nonnegative sum-to-1 kernels via softmax over random scores.
KernelField<double> random_kernels(int out_h, int out_w, int k, uint64_t seed) {
  KernelField<double> field(out_h, out_w, k);
  sapa::Rng rng(seed);
  std::vector<double> scores(static_cast<size_t>(k) * k);
  for (int i = 0; i < out_h; ++i) {
    for (int j = 0; j < out_w; ++j) {
      for (double& s : scores) s = rng.uniform(-2.0, 2.0);
      sapa::normalize_window(std::span<const double>(scores.data(), scores.size()),
                             std::span<double>(field.window(i, j), scores.size()),
                             NormKind::kExp);
    }
  }
  return field;
}

}  // namespace

TEST_CASE("uniform kernels on a constant map reproduce the constant") {
  const auto value = test_util::random_vector<double>(3, 7);
  const auto decoder = test_util::constant_tensor(4, 4, value);
  KernelField<double> kernels(8, 8, 5);
  for (double& w : kernels.weights) w = 1.0 / 25.0;
  const auto out = sapa::assemble(decoder, kernels, 2);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      for (int ch = 0; ch < 3; ++ch) {
        REQUIRE(out(i, j, ch) ==
                doctest::Approx(value[static_cast<size_t>(ch)]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("a one-hot center kernel reduces assembly to nearest neighbor") {
  const auto decoder = test_util::random_tensor<double>(3, 5, 4, 13);
  KernelField<double> kernels(6, 10, 3);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 10; ++j) {
      kernels.window(i, j)[4] = 1.0;  // offset (0, 0)
    }
  }
  const auto out = sapa::assemble(decoder, kernels, 2);
  const auto nn = sapa::upsample_nearest(decoder, 2);
  REQUIRE(out.data() == nn.data());
}

TEST_CASE("assembly matches a naive loop and stays inside the window hull") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const int h = 2 + static_cast<int>(seed % 4);
    const int w = 3 + static_cast<int>(seed % 3);
    const int c = 1 + static_cast<int>(seed % 5);
    const int k = (seed % 2 == 0) ? 3 : 5;
    const int ratio = 2;
    const auto decoder = test_util::random_tensor<double>(h, w, c, seed);
    const auto kernels = random_kernels(ratio * h, ratio * w, k, seed + 50);
    const auto out = sapa::assemble(decoder, kernels, ratio);

    const int r = k / 2;
    for (int oi = 0; oi < out.height(); ++oi) {
      for (int oj = 0; oj < out.width(); ++oj) {
        const int li = oi / ratio, lj = oj / ratio;
        const double* weights = kernels.window(oi, oj);
        for (int ch = 0; ch < c; ++ch) {
          double acc = 0.0, lo = 1e300, hi = -1e300;
          int p = 0;
          for (int du = -r; du <= r; ++du) {
            for (int dv = -r; dv <= r; ++dv, ++p) {
              const double v = decoder(sapa::clamp_index(li + du, h),
                                       sapa::clamp_index(lj + dv, w), ch);
              acc += weights[p] * v;
              lo = std::min(lo, v);
              hi = std::max(hi, v);
            }
          }
          REQUIRE(out(oi, oj, ch) == doctest::Approx(acc).epsilon(1e-12));
          REQUIRE(out(oi, oj, ch) >= lo - 1e-12);
          REQUIRE(out(oi, oj, ch) <= hi + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("assembly validates the kernel field shape") {
  const auto decoder = test_util::random_tensor<double>(3, 3, 2, 1);
  KernelField<double> kernels(5, 6, 3);
  CHECK_THROWS_AS(sapa::assemble(decoder, kernels, 2), sapa::ConfigError);
}

TEST_CASE("a constant decoder passes through every variant unchanged") {
  const auto value = test_util::random_vector<float>(5, 23);
  const auto decoder = test_util::constant_tensor(3, 4, value);
  const auto encoder = test_util::random_tensor<float>(6, 8, 5, 24);
  const auto params = SapaParams<float>::seeded(5, 5, 3, 25);
  for (const SimilarityKind sim :
       {SimilarityKind::kInner, SimilarityKind::kBilinear,
        SimilarityKind::kGatedBilinear}) {
    for (const NormKind nk : {NormKind::kExp, NormKind::kRelu,
                              NormKind::kSigmoid, NormKind::kSoftplus}) {
      UpsamplerConfig cfg;
      cfg.similarity = sim;
      cfg.norm = nk;
      cfg.kernel_size = 5;
      cfg.embed_dim = 3;
      const auto result = sapa_forward(encoder, decoder, params, cfg);
      for (int i = 0; i < result.output.height(); ++i) {
        for (int j = 0; j < result.output.width(); ++j) {
          for (int ch = 0; ch < 5; ++ch) {
            REQUIRE(std::abs(result.output(i, j, ch) -
                             value[static_cast<size_t>(ch)]) < 1e-6f);
          }
        }
      }
    }
  }
}

TEST_CASE("a zero encoder with inner similarity box-filters the decoder") {
  const auto decoder = test_util::random_tensor<double>(4, 4, 3, 33);
  Tensor<double> encoder(8, 8, 3);  // all zeros -> all scores zero
  UpsamplerConfig cfg;
  cfg.similarity = SimilarityKind::kInner;
  cfg.kernel_size = 3;
  const auto result = sapa_forward(encoder, decoder, SapaParams<double>(), cfg);

  for (const double w : result.kernels.weights) {
    REQUIRE(w == doctest::Approx(1.0 / 9).epsilon(1e-12));
  }
  for (int oi = 0; oi < 8; ++oi) {
    for (int oj = 0; oj < 8; ++oj) {
      for (int ch = 0; ch < 3; ++ch) {
        double acc = 0.0;
        for (int du = -1; du <= 1; ++du) {
          for (int dv = -1; dv <= 1; ++dv) {
            acc += decoder(sapa::clamp_index(oi / 2 + du, 4),
                           sapa::clamp_index(oj / 2 + dv, 4), ch);
          }
        }
        REQUIRE(result.output(oi, oj, ch) ==
                doctest::Approx(acc / 9.0).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("forward matches the naive reference on random instances") {
  int idx = 0;
  for (const SimilarityKind sim :
       {SimilarityKind::kInner, SimilarityKind::kBilinear,
        SimilarityKind::kGatedBilinear}) {
    for (const NormKind nk : {NormKind::kExp, NormKind::kRelu,
                              NormKind::kSigmoid, NormKind::kSoftplus}) {
      const uint64_t seed = 1000 + static_cast<uint64_t>(idx++);
      const auto decoder = test_util::random_tensor<double>(6, 6, 4, seed);
      const auto encoder = test_util::random_tensor<double>(12, 12, 4, seed + 1);
      const auto params = SapaParams<double>::seeded(4, 4, 3, seed + 2);
      UpsamplerConfig cfg;
      cfg.similarity = sim;
      cfg.norm = nk;
      cfg.kernel_size = 5;
      cfg.embed_dim = 3;
      const auto fast = sapa_forward(encoder, decoder, params, cfg, 2);
      const auto slow = reference::forward(encoder, decoder, params, cfg);
      for (size_t i = 0; i < fast.output.size(); ++i) {
        REQUIRE(std::abs(fast.output.data()[i] - slow.data()[i]) < 1e-6);
      }
    }
  }
}

TEST_CASE("forward output always has the contracted shape and finite values") {
  for (uint64_t seed = 0; seed < 6; ++seed) {
    const int h = 1 + static_cast<int>(seed % 3);
    const int w = 2 + static_cast<int>(seed % 2);
    const int c = 1 + static_cast<int>(seed % 4);
    const int ratio = 1 + static_cast<int>(seed % 3);
    const auto decoder = test_util::random_tensor<float>(h, w, c, seed);
    const auto encoder =
        test_util::random_tensor<float>(ratio * h, ratio * w, c, seed + 9);
    const auto params = SapaParams<float>::seeded(c, c, 2, seed + 10);
    UpsamplerConfig cfg;
    cfg.similarity = SimilarityKind::kGatedBilinear;
    cfg.kernel_size = 3;
    cfg.embed_dim = 2;
    cfg.ratio = ratio;
    const auto result = sapa_forward(encoder, decoder, params, cfg);
    REQUIRE(result.output.height() == ratio * h);
    REQUIRE(result.output.width() == ratio * w);
    REQUIRE(result.output.channels() == c);
    REQUIRE(result.output.all_finite());
    REQUIRE(result.kernels.to_tensor().all_finite());
  }
}

TEST_CASE("nearest neighbor copies source vectors") {
  SUBCASE("1x1 becomes r x r copies") {
    const auto t = Tensor<float>::from_data(1, 1, 2, {4.0f, -1.0f});
    const auto out = sapa::upsample_nearest(t, 3);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        CHECK(out(i, j, 0) == 4.0f);
        CHECK(out(i, j, 1) == -1.0f);
      }
    }
  }
  SUBCASE("ratio 1 is the identity") {
    const auto t = test_util::random_tensor<float>(3, 4, 2, 55);
    CHECK(sapa::upsample_nearest(t, 1).data() == t.data());
  }
  SUBCASE("2x1 column doubles each row") {
    const auto t = Tensor<float>::from_data(2, 1, 1, {1.0f, 2.0f});
    const auto out = sapa::upsample_nearest(t, 2);
    REQUIRE(out.height() == 4);
    REQUIRE(out.width() == 2);
    for (int j = 0; j < 2; ++j) {
      CHECK(out(0, j, 0) == 1.0f);
      CHECK(out(1, j, 0) == 1.0f);
      CHECK(out(2, j, 0) == 2.0f);
      CHECK(out(3, j, 0) == 2.0f);
    }
  }
}

TEST_CASE("bilinear interpolation uses half-pixel centers") {
  SUBCASE("constant maps stay constant") {
    const auto t = test_util::constant_tensor<double>(3, 3, {2.5});
    const auto out = sapa::upsample_bilinear(t, 2);
    for (const double v : out.data()) REQUIRE(v == doctest::Approx(2.5));
  }
  SUBCASE("ratio 1 is the identity") {
    const auto t = test_util::random_tensor<double>(2, 5, 3, 66);
    CHECK(sapa::upsample_bilinear(t, 1).data() == t.data());
  }
  SUBCASE("2x2 step pattern matches the per-pixel closed form") {
    const auto t = Tensor<double>::from_data(2, 2, 1, {0.0, 1.0, 0.0, 1.0});
    const auto out = sapa::upsample_bilinear(t, 2);
    // Direct formula: src = (dst + 0.5)/2 - 0.5 clamped to [0, 1]; rows are
    // equal so only the column interpolation matters.
    for (int oj = 0; oj < 4; ++oj) {
      double src = (oj + 0.5) / 2.0 - 0.5;
      src = std::min(1.0, std::max(0.0, src));
      const int c0 = static_cast<int>(std::floor(src));
      const int c1 = std::min(c0 + 1, 1);
      const double frac = src - c0;
      const double expected = (1.0 - frac) * t(0, c0, 0) + frac * t(0, c1, 0);
      for (int oi = 0; oi < 4; ++oi) {
        REQUIRE(out(oi, oj, 0) == doctest::Approx(expected).epsilon(1e-12));
      }
    }
  }
  SUBCASE("align_corners pins the corners to the input corners") {
    const auto t = test_util::random_tensor<double>(2, 2, 1, 67);
    const auto out = sapa::upsample_bilinear(t, 3, /*align_corners=*/true);
    CHECK(out(0, 0, 0) == doctest::Approx(t(0, 0, 0)));
    CHECK(out(0, 5, 0) == doctest::Approx(t(0, 1, 0)));
    CHECK(out(5, 0, 0) == doctest::Approx(t(1, 0, 0)));
    CHECK(out(5, 5, 0) == doctest::Approx(t(1, 1, 0)));
  }
}

TEST_CASE("the full forward is bitwise reproducible across runs and threads") {
  const auto decoder = test_util::random_tensor<float>(6, 6, 8, 71);
  const auto encoder = test_util::random_tensor<float>(12, 12, 8, 72);
  const auto params = SapaParams<float>::seeded(8, 8, 4, 73);
  UpsamplerConfig cfg;
  cfg.embed_dim = 4;
  const auto a = sapa_forward(encoder, decoder, params, cfg, 1);
  const auto b = sapa_forward(encoder, decoder, params, cfg, 4);
  const auto c = sapa_forward(encoder, decoder, params, cfg, 4);
  REQUIRE(std::memcmp(a.output.data().data(), b.output.data().data(),
                      a.output.size() * sizeof(float)) == 0);
  REQUIRE(std::memcmp(b.output.data().data(), c.output.data().data(),
                      b.output.size() * sizeof(float)) == 0);
}
