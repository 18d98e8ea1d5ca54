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

#include <algorithm>
#include <map>
#include <set>

#include "rowconv/execmodel.hpp"

namespace rowconv::testing {

// Brute-force model of the stage-1 input loads: walk every thread of every
// block, collect the line of each in-bounds address into a per-warp set.
struct OracleWarp {
  std::size_t filter, row, split, iteration, warp, channel;
  auto operator<=>(const OracleWarp&) const = default;
};

inline std::map<OracleWarp, std::set<std::size_t>> oracle_lines(const ConvConfig& cfg, const DeviceModel& dev,
                                                         const LaunchPlan& plan, bool all_filters,
                                                         std::size_t* filters_walked = nullptr) {
  const std::size_t ho = cfg.h + 2 * cfg.pad_h - cfg.hf + 1;
  const std::size_t wo = cfg.w + 2 * cfg.pad_w - cfg.wf + 1;
  const std::size_t work = cfg.n * ho * wo;
  const bool plane_aligned = (cfg.h * cfg.w * dev.element_bytes) % dev.line_bytes == 0;
  const std::size_t channels = plane_aligned ? 1 : std::min<std::size_t>(cfg.c, 4);
  const std::size_t chunk = plan.threads_per_block * plan.dot_products_per_thread;
  const std::size_t filters = all_filters ? cfg.m : 1;
  if (filters_walked) *filters_walked = filters;

  std::map<OracleWarp, std::set<std::size_t>> lines;
  for (std::size_t b = 0; b < plan.blocks; ++b) {
    const std::size_t filter = b / (plan.split_per_filter_row * cfg.hf * cfg.wf);
    if (filter >= filters) continue;
    const std::size_t row = (b / plan.split_per_filter_row) % (cfg.hf * cfg.wf);
    const std::size_t split = b % plan.split_per_filter_row;
    const long yf = static_cast<long>(row / cfg.wf), xf = static_cast<long>(row % cfg.wf);
    for (std::size_t t = 0; t < plan.threads_per_block; ++t) {
      for (std::size_t i = 0; i < plan.dot_products_per_thread; ++i) {
        const std::size_t item = split * chunk + i * plan.threads_per_block + t;
        if (item >= work || item >= (split + 1) * chunk) continue;
        const long n = static_cast<long>(item / (ho * wo));
        const long y = static_cast<long>((item / wo) % ho);
        const long x = static_cast<long>(item % wo);
        const long yi = y + yf - static_cast<long>(cfg.pad_h);
        const long xi = x + xf - static_cast<long>(cfg.pad_w);
        if (yi < 0 || xi < 0 || yi >= static_cast<long>(cfg.h) || xi >= static_cast<long>(cfg.w)) continue;
        for (std::size_t c = 0; c < channels; ++c) {
          const long addr = ((n * static_cast<long>(cfg.c) + static_cast<long>(c)) * static_cast<long>(cfg.h) + yi) *
                                static_cast<long>(cfg.w) + xi;
          const std::size_t byte = static_cast<std::size_t>(addr) * dev.element_bytes;
          lines[{filter, row, split, i, t / dev.warp_width, c}].insert(byte / dev.line_bytes);
        }
      }
    }
  }
  return lines;
}

struct OracleTotals {
  std::size_t transactions = 0, warps = 0, perfect = 0;
};

inline OracleTotals oracle_totals(const ConvConfig& cfg, const DeviceModel& dev, const LaunchPlan& plan) {
  OracleTotals t;
  for (const auto& [site, set] : oracle_lines(cfg, dev, plan, true)) {
    t.transactions += set.size();
    t.warps += 1;
    t.perfect += set.size() == 1 ? 1 : 0;
  }
  return t;
}

}  // namespace rowconv::testing
