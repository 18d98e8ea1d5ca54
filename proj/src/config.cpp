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

#include "rowconv/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "rowconv/errors.hpp"

namespace rowconv {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::size_t parse_count(std::string_view text, std::size_t line, const char* field) {
  std::size_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    throw ParseError(line, std::string("field '") + field + "' is not a non-negative integer: '" +
                               std::string(text) + "'");
  }
  return value;
}

}  // namespace

Dims4 ConvConfig::output_dims4() const noexcept {
  return {n, m, (h + 2 * pad_h - hf) / stride + 1, (w + 2 * pad_w - wf) / stride + 1};
}

std::string ConvConfig::short_label() const {
  return std::to_string(h) + "-" + std::to_string(m) + "-" + std::to_string(c);
}

void validate(const ConvConfig& cfg) {
  const std::pair<const char*, std::size_t> counts[] = {
      {"n", cfg.n}, {"c", cfg.c},   {"h", cfg.h},   {"w", cfg.w},
      {"m", cfg.m}, {"hf", cfg.hf}, {"wf", cfg.wf}, {"stride", cfg.stride}};
  for (const auto& [field, value] : counts) {
    if (value == 0) throw InvalidConfig(field, "must be >= 1");
  }
  if (cfg.h + 2 * cfg.pad_h < cfg.hf) throw InvalidConfig("hf", "filter taller than padded input");
  if (cfg.w + 2 * cfg.pad_w < cfg.wf) throw InvalidConfig("wf", "filter wider than padded input");
}

OutputDims output_dims(const ConvConfig& cfg) {
  validate(cfg);
  return {(cfg.h + 2 * cfg.pad_h - cfg.hf) / cfg.stride + 1,
          (cfg.w + 2 * cfg.pad_w - cfg.wf) / cfg.stride + 1};
}

Padding same_padding(std::size_t hf, std::size_t wf) {
  if (hf % 2 == 0 || wf % 2 == 0) {
    throw UnsupportedFilter("same padding needs odd filter sizes, got " + std::to_string(hf) + "x" +
                            std::to_string(wf));
  }
  return {(hf - 1) / 2, (wf - 1) / 2};
}

std::size_t filter_row_reuse(const ConvConfig& cfg) {
  if (cfg.stride != 1) throw Unsupported("filter row reuse is defined for stride 1 only");
  const auto out = output_dims(cfg);
  return out.h * out.w;
}

ConvConfig make_same_config(std::string name, std::size_t n, std::size_t c, std::size_t hw,
                            std::size_t m, std::size_t f) {
  const auto pad = same_padding(f, f);
  ConvConfig cfg{std::move(name), n, c, hw, hw, m, f, f, 1, pad.h, pad.w};
  validate(cfg);
  return cfg;
}

std::vector<ConvConfig> preset_configs() {
  // Labels read [input X&Y]-[batch]-[filter size]-[filters]-[depth].
  return {
      make_same_config("1x1-A", 1, 832, 7, 256, 1),   // 7-1-1-256-832
      make_same_config("1x1-B", 1, 256, 14, 1024, 1),  // 14-1-1-1024-256
      make_same_config("1x1-C", 1, 64, 27, 256, 1),    // 27-1-1-256-64
      make_same_config("3x3-A", 1, 192, 7, 384, 3),    // 7-1-3-384-192
      make_same_config("3x3-B", 1, 384, 13, 384, 3),   // 13-1-3-384-384
      make_same_config("5x5-A", 1, 48, 7, 128, 5),     // 7-1-5-128-48
      make_same_config("5x5-B", 8, 48, 7, 128, 5),     // 7-8-5-128-48
  };
}

std::vector<ConvConfig> parse_configs(std::istream& in) {
  static constexpr const char* kFields[] = {"name", "n",  "c",      "h",     "w",    "m",
                                            "hf",   "wf", "stride", "pad_h", "pad_w"};
  std::vector<ConvConfig> out;
  std::string raw;
  std::size_t line_no = 0;
  bool seen_row = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (!seen_row && line == kConfigCsvHeader) {
      seen_row = true;
      continue;
    }
    seen_row = true;

    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (cells.size() != std::size(kFields)) {
      throw ParseError(line_no, "expected 11 comma-separated fields, got " + std::to_string(cells.size()));
    }
    if (cells[0].empty()) throw ParseError(line_no, "empty config name");

    ConvConfig cfg;
    cfg.name = std::string(cells[0]);
    std::size_t* slots[] = {&cfg.n,  &cfg.c,      &cfg.h,     &cfg.w,    &cfg.m,
                            &cfg.hf, &cfg.wf,     &cfg.stride, &cfg.pad_h, &cfg.pad_w};
    for (std::size_t i = 0; i < std::size(slots); ++i) {
      *slots[i] = parse_count(cells[i + 1], line_no, kFields[i + 1]);
    }
    try {
      validate(cfg);
    } catch (const InvalidConfig& e) {
      throw InvalidConfig(e.field(), "line " + std::to_string(line_no) + ": " + e.what());
    }
    out.push_back(std::move(cfg));
  }
  return out;
}

std::vector<ConvConfig> parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  return parse_configs(in);
}

}  // namespace rowconv
