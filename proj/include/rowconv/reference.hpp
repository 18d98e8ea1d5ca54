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

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rowconv/config.hpp"
#include "rowconv/parallel.hpp"
#include "rowconv/tensor.hpp"

namespace rowconv {

/// Row-major dense float matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0f) {}
  Matrix(std::size_t r, std::size_t c, std::vector<float> values);

  float& operator()(std::size_t i, std::size_t j) noexcept { return data[i * cols + j]; }
  float operator()(std::size_t i, std::size_t j) const noexcept { return data[i * cols + j]; }
};

/// Lowered input of one image: row (c, yf, xf) with xf fastest, column (y, x)
/// of the output with x fastest.
using Im2colMatrix = Matrix;

/// Direct convolution. Each output element sums, for (yf, xf) in row-major
/// order, the channel dot product accumulated from zero with c ascending.
Tensor4 conv_naive(const Tensor4& input, const Tensor4& filters, const ConvConfig& cfg,
                   ExecOptions opts = {});

/// Same loop nest accumulated in double and rounded once per element.
Tensor4 conv_naive_f64(const Tensor4& input, const Tensor4& filters, const ConvConfig& cfg,
                       ExecOptions opts = {});

Im2colMatrix im2col(const Tensor4& input, const ConvConfig& cfg, std::size_t n);

/// c(i,j) = sum over k ascending of a(i,k) * b(k,j).
Matrix gemm(const Matrix& a, const Matrix& b, ExecOptions opts = {});

/// Explicit im2col followed by one GEMM per image.
Tensor4 conv_gemm(const Tensor4& input, const Tensor4& filters, const ConvConfig& cfg,
                  ExecOptions opts = {});

/// Winograd F(2x2, 3x3) over overlapping 4x4 input tiles. 3x3 filters, stride 1.
Tensor4 conv_winograd_f22(const Tensor4& input, const Tensor4& filters, const ConvConfig& cfg,
                          ExecOptions opts = {});

/// Bytes of the im2col matrix (one image at a time).
std::size_t gemm_workspace_bytes(const ConvConfig& cfg);
/// Bytes of the transformed filters, tiles and products for one image.
std::size_t winograd_workspace_bytes(const ConvConfig& cfg);

/// Throws ShapeMismatch unless input and filters have the dims cfg implies.
void check_conv_shapes(const Tensor4& input, const Tensor4& filters, const ConvConfig& cfg);

/// max |got - want| / max |want| over all elements; the plain absolute error when
/// `want` is all zeros. Throws ShapeMismatch if dims differ.
double max_relative_error(const Tensor4& got, const Tensor4& want);

}  // namespace rowconv
