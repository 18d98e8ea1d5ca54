// Copyright (c) 2026, The rowconv Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <random>

#include "rowconv/errors.hpp"
#include "rowconv/reference.hpp"
#include "test_support.hpp"

namespace rowconv {
namespace {

using testing::random_same_config;
using testing::small_int_tensor;

ConvConfig tiny(std::size_t c, std::size_t h, std::size_t w, std::size_t m, std::size_t f, std::size_t pad,
                std::size_t n = 1, std::size_t stride = 1) {
  return ConvConfig{"tiny", n, c, h, w, m, f, f, stride, pad, pad};
}

Tensor4 scaled(const Tensor4& t, float s) {
  Tensor4 out = t;
  for (float& v : out.data()) v *= s;
  return out;
}

TEST(ConvNaive, SingleElement) {
  const auto cfg = tiny(1, 1, 1, 1, 1, 0);
  const Tensor4 in = make_tensor({1, 1, 1, 1}, fill::Constant{2.0f});
  const Tensor4 f = make_tensor({1, 1, 1, 1}, fill::Constant{3.0f});
  EXPECT_EQ(conv_naive(in, f, cfg)(0, 0, 0, 0), 6.0f);
  EXPECT_EQ(conv_naive_f64(in, f, cfg)(0, 0, 0, 0), 6.0f);
}

TEST(ConvNaive, UnitOneByOneIsIdentity) {
  const auto cfg = tiny(1, 5, 6, 1, 1, 0, 2);
  const Tensor4 in = make_tensor(cfg.input_dims(), fill::Uniform{3, -1.0f, 1.0f});
  const Tensor4 f = make_tensor(cfg.filter_dims(), fill::Constant{1.0f});
  EXPECT_TRUE(bitwise_equal(conv_naive(in, f, cfg), in));
  EXPECT_TRUE(bitwise_equal(conv_naive_f64(in, f, cfg), in));
}

TEST(ConvNaive, AllOnesThreeByThreeCenter) {
  const auto cfg = tiny(1, 3, 3, 1, 3, 1);
  const Tensor4 in({1, 1, 3, 3}, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  const Tensor4 f = make_tensor(cfg.filter_dims(), fill::Constant{1.0f});
  float total = 0.0f;
  for (float v : in.data()) total += v;
  const Tensor4 out = conv_naive(in, f, cfg);
  EXPECT_EQ(out(0, 0, 1, 1), total);
  EXPECT_EQ(out(0, 0, 1, 1), 45.0f);
  // Corner sees the 2x2 window {1,2,4,5}.
  EXPECT_EQ(out(0, 0, 0, 0), 12.0f);
  EXPECT_EQ(conv_naive_f64(in, f, cfg)(0, 0, 1, 1), 45.0f);
}

TEST(ConvNaive, MatchesDoubleOracle) {
  const auto cfg = tiny(64, 8, 8, 4, 3, 1);
  const Tensor4 in = make_tensor(cfg.input_dims(), fill::Uniform{1, -1.0f, 1.0f});
  const Tensor4 f = make_tensor(cfg.filter_dims(), fill::Uniform{2, -1.0f, 1.0f});
  EXPECT_LE(max_relative_error(conv_naive(in, f, cfg), conv_naive_f64(in, f, cfg)), 1e-4);
}

TEST(ConvNaive, ZeroInputGivesZeroOutput) {
  const auto cfg = tiny(3, 6, 6, 2, 3, 1);
  const Tensor4 in(cfg.input_dims());
  const Tensor4 f = make_tensor(cfg.filter_dims(), fill::Uniform{2, -1.0f, 1.0f});
  const Tensor4 out = conv_naive_f64(in, f, cfg);
  for (float v : out.data()) EXPECT_EQ(v, 0.0f);
}

TEST(ConvNaive, DepthMismatch) {
  const auto cfg = tiny(3, 4, 4, 2, 3, 1);
  const Tensor4 in(cfg.input_dims());
  const Tensor4 bad({2, 4, 3, 3});
  EXPECT_THROW(conv_naive(in, bad, cfg), ShapeMismatch);
  EXPECT_THROW(conv_naive_f64(in, Tensor4({2, 3, 5, 5}), cfg), ShapeMismatch);
}

TEST(ConvNaive, StridedMatchesBruteForce) {
  std::mt19937_64 gen(5);
  const auto cfg = tiny(2, 7, 9, 3, 3, 1, 2, 2);
  const Tensor4 in = small_int_tensor(cfg.input_dims(), gen);
  const Tensor4 f = small_int_tensor(cfg.filter_dims(), gen);
  const Tensor4 out = conv_naive(in, f, cfg);
  ASSERT_EQ(out.dims(), (Dims4{2, 3, 4, 5}));
  for (std::size_t n = 0; n < 2; ++n)
    for (std::size_t m = 0; m < 3; ++m)
      for (std::size_t y = 0; y < 4; ++y)
        for (std::size_t x = 0; x < 5; ++x) {
          float s = 0.0f;
          for (std::size_t c = 0; c < 2; ++c)
            for (std::size_t yf = 0; yf < 3; ++yf)
              for (std::size_t xf = 0; xf < 3; ++xf)
                s += read_padded(in, n, c, static_cast<std::ptrdiff_t>(2 * y + yf) - 1,
                                 static_cast<std::ptrdiff_t>(2 * x + xf) - 1) *
                     f(m, c, yf, xf);
          EXPECT_EQ(out(n, m, y, x), s);
        }
}

TEST(ConvNaive, Linearity) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 10; ++trial) {
    const ConvConfig cfg = random_same_config(gen, 2, 10, 12, 4);
    const Tensor4 x = make_tensor(cfg.input_dims(), fill::Uniform{gen(), -1.0f, 1.0f});
    const Tensor4 f = make_tensor(cfg.filter_dims(), fill::Uniform{gen(), -1.0f, 1.0f});
    const Tensor4 g = make_tensor(cfg.filter_dims(), fill::Uniform{gen(), -1.0f, 1.0f});
    const Tensor4 base = conv_naive(x, f, cfg);
    for (float alpha : {0.25f, 2.0f, 8.0f}) {
      EXPECT_TRUE(bitwise_equal(conv_naive(scaled(x, alpha), f, cfg), scaled(base, alpha)));
    }
    Tensor4 fg = f;
    for (std::size_t i = 0; i < fg.size(); ++i) fg.data()[i] += g.data()[i];
    Tensor4 sum = base;
    const Tensor4 other = conv_naive(x, g, cfg);
    for (std::size_t i = 0; i < sum.size(); ++i) sum.data()[i] += other.data()[i];
    EXPECT_LE(max_relative_error(conv_naive(x, fg, cfg), sum), 1e-5);
  }
}

TEST(Im2col, OneByOneIsFlattenedInput) {
  const auto cfg = tiny(3, 4, 5, 1, 1, 0);
  const Tensor4 in = make_tensor(cfg.input_dims(), fill::Uniform{9, -1.0f, 1.0f});
  const Im2colMatrix mat = im2col(in, cfg, 0);
  ASSERT_EQ(mat.rows, 3u);
  ASSERT_EQ(mat.cols, 20u);
  for (std::size_t i = 0; i < in.size(); ++i) EXPECT_EQ(mat.data[i], in.data()[i]);
}

TEST(Im2col, PaddedCornerColumn) {
  const auto cfg = tiny(1, 3, 3, 1, 3, 1);
  const Tensor4 in({1, 1, 3, 3}, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  const Im2colMatrix mat = im2col(in, cfg, 0);
  ASSERT_EQ(mat.rows, 9u);
  ASSERT_EQ(mat.cols, 9u);
  const float expected[9] = {0, 0, 0, 0, 1, 2, 0, 4, 5};
  for (std::size_t r = 0; r < 9; ++r) EXPECT_EQ(mat(r, 0), expected[r]) << "row " << r;
}

TEST(Im2col, NonOverlappingTilingHasNoDuplicates) {
  const auto cfg = tiny(2, 6, 6, 1, 3, 0, 1, 3);
  Tensor4 in(cfg.input_dims());
  for (std::size_t i = 0; i < in.size(); ++i) in.data()[i] = static_cast<float>(i + 1);
  const Im2colMatrix mat = im2col(in, cfg, 0);
  std::vector<float> seen = mat.data;
  std::sort(seen.begin(), seen.end());
  EXPECT_EQ(std::adjacent_find(seen.begin(), seen.end()), seen.end());
  EXPECT_EQ(seen.size(), in.size());
}

TEST(Im2col, ColumnsReproduceReceptiveFields) {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 20; ++trial) {
    ConvConfig cfg = random_same_config(gen, 3, 9, 4, 1);
    cfg.stride = 1 + gen() % 2;
    const Tensor4 in = make_tensor(cfg.input_dims(), fill::Uniform{gen(), -1.0f, 1.0f});
    const std::size_t n = gen() % cfg.n;
    const Im2colMatrix mat = im2col(in, cfg, n);
    const auto out = output_dims(cfg);
    ASSERT_EQ(mat.cols, out.h * out.w);
    ASSERT_EQ(mat.rows, cfg.c * cfg.hf * cfg.wf);
    for (std::size_t col = 0; col < mat.cols; ++col) {
      const std::size_t y = col / out.w, x = col % out.w;
      for (std::size_t row = 0; row < mat.rows; ++row) {
        const std::size_t c = row / (cfg.hf * cfg.wf), yf = (row / cfg.wf) % cfg.hf, xf = row % cfg.wf;
        const float want = read_padded(in, n, c, static_cast<std::ptrdiff_t>(y * cfg.stride + yf) - static_cast<std::ptrdiff_t>(cfg.pad_h),
                                       static_cast<std::ptrdiff_t>(x * cfg.stride + xf) - static_cast<std::ptrdiff_t>(cfg.pad_w));
        ASSERT_EQ(mat(row, col), want);
      }
    }
  }
  const auto cfg = tiny(1, 3, 3, 1, 3, 1);
  EXPECT_THROW(im2col(Tensor4(cfg.input_dims()), cfg, 1), IndexError);
}

TEST(Gemm, Basics) {
  const Matrix a(2, 2, {1, 2, 3, 4});
  const Matrix b(2, 2, {5, 6, 7, 8});
  EXPECT_EQ(gemm(a, b).data, (std::vector<float>{19, 22, 43, 50}));

  Matrix eye(3, 3);
  for (std::size_t i = 0; i < 3; ++i) eye(i, i) = 1.0f;
  const Matrix m(3, 4, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
  EXPECT_EQ(gemm(eye, m).data, m.data);

  const std::size_t q = 300;
  const Matrix row(1, q, std::vector<float>(q, 1.0f));
  const Matrix col(q, 1, std::vector<float>(q, 1.0f));
  const Matrix dot = gemm(row, col);
  ASSERT_EQ(dot.rows, 1u);
  EXPECT_EQ(dot(0, 0), static_cast<float>(q));

  EXPECT_THROW(gemm(Matrix(2, 3), Matrix(2, 3)), ShapeMismatch);
}

TEST(Gemm, MatchesTripleLoopAcrossBlockEdges) {
  std::mt19937_64 gen(4);
  const Matrix a(37, 260, [&] {
    std::vector<float> v(37 * 260);
    for (float& x : v) x = static_cast<float>(static_cast<int>(gen() % 7) - 3);
    return v;
  }());
  const Matrix b(260, 19, [&] {
    std::vector<float> v(260 * 19);
    for (float& x : v) x = static_cast<float>(static_cast<int>(gen() % 7) - 3);
    return v;
  }());
  const Matrix c = gemm(a, b, {3});
  for (std::size_t i = 0; i < 37; ++i)
    for (std::size_t j = 0; j < 19; ++j) {
      float s = 0.0f;
      for (std::size_t k = 0; k < 260; ++k) s += a(i, k) * b(k, j);
      EXPECT_EQ(c(i, j), s);
    }
}

TEST(ConvGemm, ExactOnSmallIntegers) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 25; ++trial) {
    ConvConfig cfg = random_same_config(gen, 3, 12, 16, 6);
    if (trial % 4 == 0) cfg.stride = 2;
    const Tensor4 in = small_int_tensor(cfg.input_dims(), gen);
    const Tensor4 f = small_int_tensor(cfg.filter_dims(), gen);
    EXPECT_TRUE(bitwise_equal(conv_gemm(in, f, cfg), conv_naive(in, f, cfg)));
  }
}

TEST(ConvGemm, OneByOneIsPerPixelMatrixProduct) {
  const auto cfg = tiny(5, 3, 4, 3, 1, 0, 2);
  const Tensor4 in = make_tensor(cfg.input_dims(), fill::Uniform{1, -1.0f, 1.0f});
  const Tensor4 f = make_tensor(cfg.filter_dims(), fill::Uniform{2, -1.0f, 1.0f});
  const Tensor4 out = conv_gemm(in, f, cfg);
  for (std::size_t n = 0; n < 2; ++n)
    for (std::size_t m = 0; m < 3; ++m)
      for (std::size_t y = 0; y < 3; ++y)
        for (std::size_t x = 0; x < 4; ++x) {
          float s = 0.0f;
          for (std::size_t c = 0; c < 5; ++c) s += f(m, c, 0, 0) * in(n, c, y, x);
          EXPECT_EQ(out(n, m, y, x), s);
        }
}

TEST(ConvGemm, ZeroFilters) {
  const auto cfg = tiny(4, 6, 6, 3, 3, 1);
  const Tensor4 in = make_tensor(cfg.input_dims(), fill::Uniform{1, -1.0f, 1.0f});
  const Tensor4 out = conv_gemm(in, Tensor4(cfg.filter_dims()), cfg);
  for (float v : out.data()) EXPECT_EQ(v, 0.0f);
}

TEST(Winograd, DeltaFilterIsIdentity) {
  const auto cfg = tiny(1, 7, 6, 1, 3, 1, 2);
  const Tensor4 in = make_tensor(cfg.input_dims(), fill::Uniform{5, -1.0f, 1.0f});
  Tensor4 f(cfg.filter_dims());
  f(0, 0, 1, 1) = 1.0f;
  const Tensor4 out = conv_winograd_f22(in, f, cfg);
  ASSERT_EQ(out.dims(), in.dims());
  EXPECT_LE(max_relative_error(out, in), 1e-6);
}

TEST(Winograd, MatchesDoubleOracle) {
  const auto cfg = tiny(4, 8, 8, 2, 3, 1);
  const Tensor4 in = make_tensor(cfg.input_dims(), fill::Uniform{1, -1.0f, 1.0f});
  const Tensor4 f = make_tensor(cfg.filter_dims(), fill::Uniform{2, -1.0f, 1.0f});
  EXPECT_LE(max_relative_error(conv_winograd_f22(in, f, cfg), conv_naive_f64(in, f, cfg)), 1e-3);
}

TEST(Winograd, OddSizesAndNoPadding) {
  std::mt19937_64 gen(12);
  for (std::size_t pad : {0, 1, 2}) {
    for (std::size_t hw : {3, 4, 5, 9}) {
      const auto cfg = tiny(3, hw, hw + 2, 2, 3, pad, 2);
      const Tensor4 in = make_tensor(cfg.input_dims(), fill::Uniform{gen(), -1.0f, 1.0f});
      const Tensor4 f = make_tensor(cfg.filter_dims(), fill::Uniform{gen(), -1.0f, 1.0f});
      EXPECT_LE(max_relative_error(conv_winograd_f22(in, f, cfg), conv_naive_f64(in, f, cfg)), 1e-3)
          << "pad " << pad << " hw " << hw;
    }
  }
}

TEST(Winograd, ZeroInputAndUnsupported) {
  const auto cfg = tiny(2, 5, 5, 2, 3, 1);
  const Tensor4 f = make_tensor(cfg.filter_dims(), fill::Uniform{2, -1.0f, 1.0f});
  const Tensor4 out = conv_winograd_f22(Tensor4(cfg.input_dims()), f, cfg);
  for (float v : out.data()) EXPECT_EQ(v, 0.0f);

  const auto five = tiny(2, 5, 5, 2, 5, 2);
  EXPECT_THROW(conv_winograd_f22(Tensor4(five.input_dims()), Tensor4(five.filter_dims()), five), Unsupported);
  const auto strided = tiny(2, 6, 6, 2, 3, 1, 1, 2);
  EXPECT_THROW(conv_winograd_f22(Tensor4(strided.input_dims()), Tensor4(strided.filter_dims()), strided),
               Unsupported);
}

TEST(RelativeError, Definition) {
  const Tensor4 want({1, 1, 1, 3}, {1.0f, -4.0f, 2.0f});
  const Tensor4 got({1, 1, 1, 3}, {1.0f, -4.0f, 2.5f});
  EXPECT_DOUBLE_EQ(max_relative_error(got, want), 0.5 / 4.0);
  EXPECT_DOUBLE_EQ(max_relative_error(got, Tensor4({1, 1, 1, 3})), 4.0);
  EXPECT_THROW(max_relative_error(got, Tensor4({1, 1, 1, 2})), ShapeMismatch);
}

}  // namespace
}  // namespace rowconv
