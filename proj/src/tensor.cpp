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

#include "rowconv/tensor.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <random>
#include <string>

#include "rowconv/errors.hpp"

namespace rowconv {

namespace {

void check_dims(const Dims4& d) {
  if (d.n == 0 || d.c == 0 || d.h == 0 || d.w == 0) {
    throw InvalidShape("tensor extents must all be >= 1, got (" + std::to_string(d.n) + "," +
                       std::to_string(d.c) + "," + std::to_string(d.h) + "," +
                       std::to_string(d.w) + ")");
  }
}

constexpr std::size_t kHeaderBytes = 4 + 2 + 4 * 4;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

Tensor4::Tensor4(Dims4 dims) : dims_(dims) {
  check_dims(dims_);
  data_.assign(dims_.count(), 0.0f);
}

Tensor4::Tensor4(Dims4 dims, std::vector<float> data) : dims_(dims), data_(std::move(data)) {
  check_dims(dims_);
  if (data_.size() != dims_.count()) {
    throw InvalidShape("buffer holds " + std::to_string(data_.size()) + " elements, dims need " +
                       std::to_string(dims_.count()));
  }
}

Coords4 Tensor4::coords_of(std::size_t flat) const noexcept {
  Coords4 p;
  p.x = flat % dims_.w;
  flat /= dims_.w;
  p.y = flat % dims_.h;
  flat /= dims_.h;
  p.c = flat % dims_.c;
  p.n = flat / dims_.c;
  return p;
}

float Tensor4::at(std::size_t n, std::size_t c, std::size_t y, std::size_t x) const {
  if (n >= dims_.n || c >= dims_.c || y >= dims_.h || x >= dims_.w) {
    throw IndexError("coordinate out of range");
  }
  return (*this)(n, c, y, x);
}

Tensor4 make_tensor(Dims4 dims, const Fill& how) {
  Tensor4 t(dims);
  auto values = t.data();
  if (const auto* k = std::get_if<fill::Constant>(&how)) {
    std::fill(values.begin(), values.end(), k->value);
  } else if (const auto* u = std::get_if<fill::Uniform>(&how)) {
    if (!(u->lo < u->hi)) throw InvalidShape("uniform fill needs lo < hi");
    std::mt19937_64 gen(u->seed);
    const double lo = u->lo;
    const double span = static_cast<double>(u->hi) - lo;
    for (float& v : values) {
      const double unit = static_cast<double>(gen() >> 40) * 0x1.0p-24;
      v = static_cast<float>(lo + span * unit);
    }
  }
  return t;
}

float read_padded(const Tensor4& t, std::size_t n, std::size_t c, std::ptrdiff_t y, std::ptrdiff_t x) {
  const Dims4& d = t.dims();
  if (n >= d.n || c >= d.c) throw IndexError("read_padded: image or channel index out of range");
  if (y < 0 || x < 0 || static_cast<std::size_t>(y) >= d.h || static_cast<std::size_t>(x) >= d.w) {
    return 0.0f;
  }
  return t(n, c, static_cast<std::size_t>(y), static_cast<std::size_t>(x));
}

std::vector<std::uint8_t> encode_tensor(const Tensor4& t) {
  const Dims4& d = t.dims();
  constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
  if (d.n > kMax || d.c > kMax || d.h > kMax || d.w > kMax) {
    throw FormatError("tensor extent does not fit the u32 header field");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + 4 * t.size());
  out.insert(out.end(), kTensorMagic.begin(), kTensorMagic.end());
  put_u16(out, kTensorFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(d.n));
  put_u32(out, static_cast<std::uint32_t>(d.c));
  put_u32(out, static_cast<std::uint32_t>(d.h));
  put_u32(out, static_cast<std::uint32_t>(d.w));
  for (float v : t.data()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

Tensor4 decode_tensor(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes) throw FormatError("truncated header");
  if (std::memcmp(bytes.data(), kTensorMagic.data(), kTensorMagic.size()) != 0) {
    throw FormatError("bad magic");
  }
  const std::uint16_t version = static_cast<std::uint16_t>(bytes[4] | (bytes[5] << 8));
  if (version != kTensorFormatVersion) {
    throw FormatError("unsupported format version " + std::to_string(version));
  }
  std::array<std::size_t, 4> ext{};
  for (std::size_t i = 0; i < 4; ++i) ext[i] = get_u32(bytes.data() + 6 + 4 * i);

  // Element count must be representable and its byte size must fit in size_t.
  std::size_t count = 1;
  for (std::size_t e : ext) {
    if (e == 0) throw FormatError("zero extent in header");
    if (count > std::numeric_limits<std::size_t>::max() / 4 / e) {
      throw FormatError("header extents overflow");
    }
    count *= e;
  }
  const std::size_t payload = bytes.size() - kHeaderBytes;
  if (payload < 4 * count) throw FormatError("truncated payload");
  if (payload > 4 * count) throw FormatError("trailing bytes after payload");

  std::vector<float> data(count);
  const std::uint8_t* p = bytes.data() + kHeaderBytes;
  for (std::size_t i = 0; i < count; ++i, p += 4) data[i] = std::bit_cast<float>(get_u32(p));
  return Tensor4(Dims4{ext[0], ext[1], ext[2], ext[3]}, std::move(data));
}

void save_tensor(const Tensor4& t, const std::filesystem::path& path) {
  const auto bytes = encode_tensor(t);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

Tensor4 load_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_tensor(bytes);
}

bool bitwise_equal(const Tensor4& a, const Tensor4& b) noexcept {
  if (a.dims() != b.dims()) return false;
  return std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(float)) == 0;
}

}  // namespace rowconv
