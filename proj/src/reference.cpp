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

#include "rowconv/reference.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "rowconv/errors.hpp"

namespace rowconv {

namespace {

std::string dims_str(const Dims4& d) {
  return "(" + std::to_string(d.n) + "," + std::to_string(d.c) + "," + std::to_string(d.h) + "," +
         std::to_string(d.w) + ")";
}

// One output plane of the direct convolution. The per-element operation
// sequence matches the two-stage algorithm exactly when T is float: each
// filter row's channel sum starts at zero, accumulates c ascending (padding
// reads contribute 0 * weight), and is then added to the output in (yf, xf) order.
template <typename T>
void naive_plane(const Tensor4& input, const Tensor4& filters, const ConvConfig& cfg, std::size_t n,
                 std::size_t m, std::span<float> out_plane) {
  const std::size_t ho = (cfg.h + 2 * cfg.pad_h - cfg.hf) / cfg.stride + 1;
  const std::size_t wo = (cfg.w + 2 * cfg.pad_w - cfg.wf) / cfg.stride + 1;
  std::vector<T> acc(ho * wo, T(0));
  std::vector<T> row(ho * wo);
  const auto h = static_cast<std::ptrdiff_t>(cfg.h);
  const auto w = static_cast<std::ptrdiff_t>(cfg.w);
  for (std::size_t yf = 0; yf < cfg.hf; ++yf) {
    for (std::size_t xf = 0; xf < cfg.wf; ++xf) {
      std::fill(row.begin(), row.end(), T(0));
      for (std::size_t c = 0; c < cfg.c; ++c) {
        const T weight = static_cast<T>(filters(m, c, yf, xf));
        const auto in = input.plane(n, c);
        for (std::size_t y = 0; y < ho; ++y) {
          const std::ptrdiff_t yi = static_cast<std::ptrdiff_t>(y * cfg.stride + yf) -
                                    static_cast<std::ptrdiff_t>(cfg.pad_h);
          T* dst = row.data() + y * wo;
          for (std::size_t x = 0; x < wo; ++x) {
            const std::ptrdiff_t xi = static_cast<std::ptrdiff_t>(x * cfg.stride + xf) -
                                      static_cast<std::ptrdiff_t>(cfg.pad_w);
            const bool inside = yi >= 0 && yi < h && xi >= 0 && xi < w;
            const T v = inside ? static_cast<T>(in[static_cast<std::size_t>(yi * w + xi)]) : T(0);
            dst[x] += v * weight;
          }
        }
      }
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += row[i];
    }
  }
  for (std::size_t i = 0; i < acc.size(); ++i) out_plane[i] = static_cast<float>(acc[i]);
}

template <typename T>
Tensor4 naive_impl(const Tensor4& input, const Tensor4& filters, const ConvConfig& cfg, ExecOptions opts) {
  check_conv_shapes(input, filters, cfg);
  Tensor4 out(cfg.output_dims4());
  parallel_for(cfg.n * cfg.m, opts.workers, [&](std::size_t task) {
    const std::size_t n = task / cfg.m;
    const std::size_t m = task % cfg.m;
    naive_plane<T>(input, filters, cfg, n, m, out.plane(n, m));
  });
  return out;
}

// Winograd F(2x2, 3x3) transforms.
constexpr float kBt[4][4] = {{1, 0, -1, 0}, {0, 1, 1, 0}, {0, -1, 1, 0}, {0, 1, 0, -1}};
constexpr float kG[4][3] = {{1, 0, 0}, {0.5f, 0.5f, 0.5f}, {0.5f, -0.5f, 0.5f}, {0, 0, 1}};
constexpr float kAt[2][4] = {{1, 1, 1, 0}, {0, 1, -1, -1}};

// u = G g G^T for one 3x3 filter slice.
std::array<float, 16> transform_filter(const Tensor4& filters, std::size_t m, std::size_t c) {
  float tmp[4][3];
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 3; ++j) {
      float s = 0.0f;
      for (int k = 0; k < 3; ++k) s += kG[i][k] * filters(m, c, k, j);
      tmp[i][j] = s;
    }
  }
  std::array<float, 16> u{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      float s = 0.0f;
      for (int k = 0; k < 3; ++k) s += tmp[i][k] * kG[j][k];
      u[i * 4 + j] = s;
    }
  }
  return u;
}

// v = B^T d B for the 4x4 tile whose top-left input coordinate is (y0, x0).
std::array<float, 16> transform_tile(const Tensor4& input, std::size_t n, std::size_t c, std::ptrdiff_t y0,
                                     std::ptrdiff_t x0) {
  float d[4][4];
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) d[i][j] = read_padded(input, n, c, y0 + i, x0 + j);
  }
  float tmp[4][4];
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      float s = 0.0f;
      for (int k = 0; k < 4; ++k) s += kBt[i][k] * d[k][j];
      tmp[i][j] = s;
    }
  }
  std::array<float, 16> v{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      float s = 0.0f;
      for (int k = 0; k < 4; ++k) s += tmp[i][k] * kBt[j][k];
      v[i * 4 + j] = s;
    }
  }
  return v;
}

struct TileGrid {
  std::size_t ho, wo, th, tw;
  std::size_t count() const { return th * tw; }
};

TileGrid tile_grid(const ConvConfig& cfg) {
  const std::size_t ho = cfg.h + 2 * cfg.pad_h - 2;
  const std::size_t wo = cfg.w + 2 * cfg.pad_w - 2;
  return {ho, wo, (ho + 1) / 2, (wo + 1) / 2};
}

}  // namespace

Matrix::Matrix(std::size_t r, std::size_t c, std::vector<float> values)
    : rows(r), cols(c), data(std::move(values)) {
  if (data.size() != r * c) throw ShapeMismatch("matrix buffer size does not match rows * cols");
}

void check_conv_shapes(const Tensor4& input, const Tensor4& filters, const ConvConfig& cfg) {
  validate(cfg);
  if (input.dims().c != filters.dims().c) {
    throw ShapeMismatch("input depth " + std::to_string(input.dims().c) + " != filter depth " +
                        std::to_string(filters.dims().c));
  }
  if (input.dims() != cfg.input_dims()) {
    throw ShapeMismatch("input dims " + dims_str(input.dims()) + " do not match config " +
                        dims_str(cfg.input_dims()));
  }
  if (filters.dims() != cfg.filter_dims()) {
    throw ShapeMismatch("filter dims " + dims_str(filters.dims()) + " do not match config " +
                        dims_str(cfg.filter_dims()));
  }
}

Tensor4 conv_naive(const Tensor4& input, const Tensor4& filters, const ConvConfig& cfg, ExecOptions opts) {
  return naive_impl<float>(input, filters, cfg, opts);
}

Tensor4 conv_naive_f64(const Tensor4& input, const Tensor4& filters, const ConvConfig& cfg,
                       ExecOptions opts) {
  return naive_impl<double>(input, filters, cfg, opts);
}

Im2colMatrix im2col(const Tensor4& input, const ConvConfig& cfg, std::size_t n) {
  validate(cfg);
  if (input.dims() != cfg.input_dims()) throw ShapeMismatch("input dims do not match config");
  if (n >= cfg.n) throw IndexError("image index " + std::to_string(n) + " out of range");
  const auto out = output_dims(cfg);
  Im2colMatrix mat(cfg.c * cfg.hf * cfg.wf, out.h * out.w);
  for (std::size_t c = 0; c < cfg.c; ++c) {
    for (std::size_t yf = 0; yf < cfg.hf; ++yf) {
      for (std::size_t xf = 0; xf < cfg.wf; ++xf) {
        float* dst = &mat((c * cfg.hf + yf) * cfg.wf + xf, 0);
        for (std::size_t y = 0; y < out.h; ++y) {
          const auto yi = static_cast<std::ptrdiff_t>(y * cfg.stride + yf) - static_cast<std::ptrdiff_t>(cfg.pad_h);
          for (std::size_t x = 0; x < out.w; ++x) {
            const auto xi =
                static_cast<std::ptrdiff_t>(x * cfg.stride + xf) - static_cast<std::ptrdiff_t>(cfg.pad_w);
            dst[y * out.w + x] = read_padded(input, n, c, yi, xi);
          }
        }
      }
    }
  }
  return mat;
}

Matrix gemm(const Matrix& a, const Matrix& b, ExecOptions opts) {
  if (a.cols != b.rows) {
    throw ShapeMismatch("gemm inner dims differ: " + std::to_string(a.cols) + " vs " + std::to_string(b.rows));
  }
  Matrix c(a.rows, b.cols);
  // Row blocks of C in parallel; within a block the k loop is tiled so a panel
  // of B stays cached. k stays ascending for every element.
  constexpr std::size_t kRowBlock = 16;
  constexpr std::size_t kDepthBlock = 128;
  const std::size_t row_blocks = (a.rows + kRowBlock - 1) / kRowBlock;
  parallel_for(row_blocks, opts.workers, [&](std::size_t rb) {
    const std::size_t i_end = std::min(a.rows, (rb + 1) * kRowBlock);
    for (std::size_t k0 = 0; k0 < a.cols; k0 += kDepthBlock) {
      const std::size_t k_end = std::min(a.cols, k0 + kDepthBlock);
      for (std::size_t i = rb * kRowBlock; i < i_end; ++i) {
        float* ci = &c.data[i * c.cols];
        for (std::size_t k = k0; k < k_end; ++k) {
          const float aik = a.data[i * a.cols + k];
          const float* bk = &b.data[k * b.cols];
          for (std::size_t j = 0; j < b.cols; ++j) ci[j] += aik * bk[j];
        }
      }
    }
  });
  return c;
}

Tensor4 conv_gemm(const Tensor4& input, const Tensor4& filters, const ConvConfig& cfg, ExecOptions opts) {
  check_conv_shapes(input, filters, cfg);
  // NCHW filters already are the M x (C*Hf*Wf) matrix, row per filter.
  const Matrix filter_mat(cfg.m, cfg.c * cfg.hf * cfg.wf,
                          std::vector<float>(filters.data().begin(), filters.data().end()));
  Tensor4 out(cfg.output_dims4());
  const std::size_t plane = out.dims().h * out.dims().w;
  for (std::size_t n = 0; n < cfg.n; ++n) {
    const Matrix product = gemm(filter_mat, im2col(input, cfg, n), opts);
    std::copy(product.data.begin(), product.data.end(), out.data().begin() + n * cfg.m * plane);
  }
  return out;
}

Tensor4 conv_winograd_f22(const Tensor4& input, const Tensor4& filters, const ConvConfig& cfg,
                          ExecOptions opts) {
  if (cfg.hf != 3 || cfg.wf != 3) throw UnsupportedFilter("Unsupported: filter size (Winograd needs 3x3)");
  if (cfg.stride != 1) throw Unsupported("Unsupported: stride");
  check_conv_shapes(input, filters, cfg);

  const TileGrid grid = tile_grid(cfg);
  const std::size_t tiles = grid.count();

  // U[xi] is an M x C matrix for each of the 16 transform positions.
  std::vector<Matrix> u(16, Matrix(cfg.m, cfg.c));
  parallel_for(cfg.m, opts.workers, [&](std::size_t m) {
    for (std::size_t c = 0; c < cfg.c; ++c) {
      const auto t = transform_filter(filters, m, c);
      for (std::size_t xi = 0; xi < 16; ++xi) u[xi](m, c) = t[xi];
    }
  });

  Tensor4 out(cfg.output_dims4());
  std::vector<Matrix> v(16, Matrix(cfg.c, tiles));
  std::vector<Matrix> prod(16);
  for (std::size_t n = 0; n < cfg.n; ++n) {
    parallel_for(cfg.c, opts.workers, [&](std::size_t c) {
      for (std::size_t t = 0; t < tiles; ++t) {
        const auto y0 = static_cast<std::ptrdiff_t>(2 * (t / grid.tw)) - static_cast<std::ptrdiff_t>(cfg.pad_h);
        const auto x0 = static_cast<std::ptrdiff_t>(2 * (t % grid.tw)) - static_cast<std::ptrdiff_t>(cfg.pad_w);
        const auto tile = transform_tile(input, n, c, y0, x0);
        for (std::size_t xi = 0; xi < 16; ++xi) v[xi](c, t) = tile[xi];
      }
    });
    for (std::size_t xi = 0; xi < 16; ++xi) prod[xi] = gemm(u[xi], v[xi], opts);

    // y = A^T M A per tile; outputs past the edge of the plane are dropped.
    parallel_for(cfg.m, opts.workers, [&](std::size_t m) {
      auto dst = out.plane(n, m);
      for (std::size_t t = 0; t < tiles; ++t) {
        float mt[4][4];
        for (std::size_t xi = 0; xi < 16; ++xi) mt[xi / 4][xi % 4] = prod[xi](m, t);
        float tmp[2][4];
        for (int i = 0; i < 2; ++i) {
          for (int j = 0; j < 4; ++j) {
            float s = 0.0f;
            for (int k = 0; k < 4; ++k) s += kAt[i][k] * mt[k][j];
            tmp[i][j] = s;
          }
        }
        const std::size_t oy = 2 * (t / grid.tw);
        const std::size_t ox = 2 * (t % grid.tw);
        for (int i = 0; i < 2; ++i) {
          for (int j = 0; j < 2; ++j) {
            float s = 0.0f;
            for (int k = 0; k < 4; ++k) s += tmp[i][k] * kAt[j][k];
            if (oy + i < grid.ho && ox + j < grid.wo) dst[(oy + i) * grid.wo + ox + j] = s;
          }
        }
      }
    });
  }
  return out;
}

std::size_t gemm_workspace_bytes(const ConvConfig& cfg) {
  const auto out = output_dims(cfg);
  return sizeof(float) * cfg.c * cfg.hf * cfg.wf * out.h * out.w;
}

std::size_t winograd_workspace_bytes(const ConvConfig& cfg) {
  validate(cfg);
  if (cfg.hf != 3 || cfg.wf != 3 || cfg.stride != 1) return 0;
  const std::size_t tiles = tile_grid(cfg).count();
  return sizeof(float) * 16 * (cfg.m * cfg.c + cfg.c * tiles + cfg.m * tiles);
}

double max_relative_error(const Tensor4& got, const Tensor4& want) {
  if (got.dims() != want.dims()) throw ShapeMismatch("cannot compare tensors of different dims");
  double max_diff = 0.0;
  double max_ref = 0.0;
  const auto g = got.data();
  const auto r = want.data();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double diff = std::abs(static_cast<double>(g[i]) - static_cast<double>(r[i]));
    if (std::isnan(diff)) return diff;
    max_diff = std::max(max_diff, diff);
    max_ref = std::max(max_ref, std::abs(static_cast<double>(r[i])));
  }
  return max_ref > 0.0 ? max_diff / max_ref : max_diff;
}

}  // namespace rowconv
