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
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rowconv/tensor.hpp"

namespace rowconv {

/// Shape of one convolutional layer. Square stride, independent padding per axis.
struct ConvConfig {
  std::string name;
  std::size_t n = 1;   ///< batch size
  std::size_t c = 1;   ///< depth (channels) of inputs and filters
  std::size_t h = 1;
  std::size_t w = 1;
  std::size_t m = 1;   ///< number of filters
  std::size_t hf = 1;
  std::size_t wf = 1;
  std::size_t stride = 1;
  std::size_t pad_h = 0;
  std::size_t pad_w = 0;

  Dims4 input_dims() const noexcept { return {n, c, h, w}; }
  Dims4 filter_dims() const noexcept { return {m, c, hf, wf}; }
  Dims4 output_dims4() const noexcept;

  /// "[input size]-[number of filters]-[depth]", e.g. "7-256-832".
  std::string short_label() const;

  friend bool operator==(const ConvConfig&, const ConvConfig&) = default;
};

struct OutputDims {
  std::size_t h = 0;
  std::size_t w = 0;
  friend bool operator==(const OutputDims&, const OutputDims&) = default;
};

struct Padding {
  std::size_t h = 0;
  std::size_t w = 0;
  friend bool operator==(const Padding&, const Padding&) = default;
};

/// Throws InvalidConfig naming the first offending field.
void validate(const ConvConfig& cfg);

OutputDims output_dims(const ConvConfig& cfg);

/// ((hf-1)/2, (wf-1)/2); throws UnsupportedFilter for even sizes.
Padding same_padding(std::size_t hf, std::size_t wf);

/// Number of input rows each filter row meets (h_out * w_out). Stride 1 only.
std::size_t filter_row_reuse(const ConvConfig& cfg);

/// Stride-1, same-padded config; throws on invalid fields.
ConvConfig make_same_config(std::string name, std::size_t n, std::size_t c, std::size_t hw,
                            std::size_t m, std::size_t f);

/// The seven profiled layers: 1x1-{A,B,C}, 3x3-{A,B}, 5x5-{A,B}.
std::vector<ConvConfig> preset_configs();

/// Batch sizes of the evaluation sweep.
inline constexpr std::array<std::size_t, 7> kBatchSweep = {1, 8, 16, 32, 64, 128, 256};

inline constexpr char kConfigCsvHeader[] = "name,n,c,h,w,m,hf,wf,stride,pad_h,pad_w";

/// CSV rows `name,n,c,h,w,m,hf,wf,stride,pad_h,pad_w`; '#' comments and blank
/// lines are skipped, as is a leading header row.
std::vector<ConvConfig> parse_configs(std::istream& in);
std::vector<ConvConfig> parse_config_file(const std::filesystem::path& path);

}  // namespace rowconv
