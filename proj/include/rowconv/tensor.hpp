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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <variant>
#include <vector>

namespace rowconv {

/// Extents of an NCHW tensor. For filters the same struct reads as (M, C, Hf, Wf).
struct Dims4 {
  std::size_t n = 1;
  std::size_t c = 1;
  std::size_t h = 1;
  std::size_t w = 1;

  std::size_t count() const noexcept { return n * c * h * w; }
  friend bool operator==(const Dims4&, const Dims4&) = default;
};

struct Coords4 {
  std::size_t n = 0;
  std::size_t c = 0;
  std::size_t y = 0;
  std::size_t x = 0;
  friend bool operator==(const Coords4&, const Coords4&) = default;
};

namespace fill {
struct Zeros {};
struct Constant {
  float value = 0.0f;
};
/// Values drawn from a std::mt19937_64 stream: each element takes the top 24
/// bits of one draw as u in [0,1) and stores lo + (hi - lo) * u rounded to float.
/// Both steps are exactly specified, so fills match across platforms.
struct Uniform {
  std::uint64_t seed = 0;
  float lo = -1.0f;
  float hi = 1.0f;
};
}  // namespace fill

using Fill = std::variant<fill::Zeros, fill::Constant, fill::Uniform>;

/// Dense single-precision 4D tensor, NCHW order with x fastest.
class Tensor4 {
 public:
  /// Zero-filled tensor. Throws InvalidShape if any extent is zero.
  explicit Tensor4(Dims4 dims);
  /// Adopts `data`; its length must equal dims.count().
  Tensor4(Dims4 dims, std::vector<float> data);

  const Dims4& dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }

  std::size_t flat_index(std::size_t n, std::size_t c, std::size_t y, std::size_t x) const noexcept {
    return ((n * dims_.c + c) * dims_.h + y) * dims_.w + x;
  }
  std::size_t flat_index(const Coords4& p) const noexcept { return flat_index(p.n, p.c, p.y, p.x); }
  Coords4 coords_of(std::size_t flat) const noexcept;

  float& operator()(std::size_t n, std::size_t c, std::size_t y, std::size_t x) noexcept {
    return data_[flat_index(n, c, y, x)];
  }
  float operator()(std::size_t n, std::size_t c, std::size_t y, std::size_t x) const noexcept {
    return data_[flat_index(n, c, y, x)];
  }

  /// Bounds-checked element access; throws IndexError.
  float at(std::size_t n, std::size_t c, std::size_t y, std::size_t x) const;

  /// Contiguous H*W plane of image n, channel c.
  std::span<const float> plane(std::size_t n, std::size_t c) const noexcept {
    return std::span<const float>(data_).subspan(flat_index(n, c, 0, 0), dims_.h * dims_.w);
  }
  std::span<float> plane(std::size_t n, std::size_t c) noexcept {
    return std::span<float>(data_).subspan(flat_index(n, c, 0, 0), dims_.h * dims_.w);
  }

 private:
  Dims4 dims_;
  std::vector<float> data_;
};

Tensor4 make_tensor(Dims4 dims, const Fill& how = fill::Zeros{});

/// Value at (n, c, y, x) with zero outside [0,H)x[0,W). Padding is never materialized.
/// Throws IndexError if n or c is out of range.
float read_padded(const Tensor4& t, std::size_t n, std::size_t c, std::ptrdiff_t y, std::ptrdiff_t x);

/// File layout: "C0NV", u16 version (1), u32 N, C, H, W, then N*C*H*W floats.
/// Every integer and float is little-endian.
inline constexpr std::array<char, 4> kTensorMagic = {'C', '0', 'N', 'V'};
inline constexpr std::uint16_t kTensorFormatVersion = 1;

void save_tensor(const Tensor4& t, const std::filesystem::path& path);
Tensor4 load_tensor(const std::filesystem::path& path);

/// Byte-level codec behind save/load, usable on in-memory buffers.
std::vector<std::uint8_t> encode_tensor(const Tensor4& t);
Tensor4 decode_tensor(std::span<const std::uint8_t> bytes);

/// True if both tensors have equal dims and identical bit patterns.
bool bitwise_equal(const Tensor4& a, const Tensor4& b) noexcept;

}  // namespace rowconv
