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

#include "rowconv/config.hpp"

namespace rowconv {

/// The handful of GPU parameters the analytical model needs.
struct DeviceModel {
  std::size_t warp_width = 32;
  std::size_t line_bytes = 128;
  std::size_t max_threads_per_block = 1024;
  std::size_t element_bytes = 4;
};

void validate(const DeviceModel& dev);

/// Decomposition of stage-1 work into thread blocks.
///
/// Every filter row (one (m, yf, xf) triple) owns `split_per_filter_row`
/// consecutive blocks. The n*h_out*w_out dot products of a row are numbered
/// x-fastest and dealt to its blocks in contiguous chunks of
/// threads_per_block * dot_products_per_thread; inside a chunk thread t takes
/// items t, t + threads_per_block, t + 2*threads_per_block, ...
struct LaunchPlan {
  std::size_t blocks = 0;
  std::size_t threads_per_block = 0;
  std::size_t split_per_filter_row = 0;
  std::size_t dot_products_per_thread = 0;

  std::size_t items_per_block() const noexcept { return threads_per_block * dot_products_per_thread; }
  friend bool operator==(const LaunchPlan&, const LaunchPlan&) = default;
};

/// Dot products one filter row takes part in: n * h_out * w_out.
std::size_t work_per_filter_row(const ConvConfig& cfg);

/// Default plan: as few blocks per filter row as the thread limit allows, one
/// dot product per thread where possible, block size rounded up to whole warps.
/// Throws Unsupported for stride != 1.
LaunchPlan plan_launch(const ConvConfig& cfg, const DeviceModel& dev);

/// Plan with an explicit split factor and block size (rounded up to whole
/// warps). dot_products_per_thread is derived so the blocks cover all work.
LaunchPlan make_plan(const ConvConfig& cfg, const DeviceModel& dev, std::size_t split,
                     std::size_t threads_per_block);

/// Throws InvalidPlan unless `plan` satisfies the block-count, thread-limit and
/// coverage invariants for `cfg`.
void validate_plan(const ConvConfig& cfg, const DeviceModel& dev, const LaunchPlan& plan);

/// What block `index` of a plan works on.
struct BlockSite {
  std::size_t filter = 0;       ///< m
  std::size_t row = 0;          ///< k = yf * wf + xf
  std::size_t split_index = 0;  ///< which chunk of the row's work
  std::size_t item_begin = 0;   ///< first dot product, inclusive
  std::size_t item_end = 0;     ///< last dot product, exclusive
};

BlockSite block_site(const ConvConfig& cfg, const LaunchPlan& plan, std::size_t index);

/// One warp-wide load: the `iteration`-th dot product of each thread in
/// `warp`, reading input channel `channel` for filter row `row` and chunk
/// `split_index`. Blocks owned by different filters read identical addresses,
/// so the filter index is not part of the site.
struct WarpSite {
  std::size_t row = 0;
  std::size_t split_index = 0;
  std::size_t iteration = 0;
  std::size_t warp = 0;
  std::size_t channel = 0;
};

/// Cache lines touched by one warp load. Addresses are element offsets into the
/// unpadded NCHW input whose base is assumed line-aligned; padded reads and
/// idle threads issue nothing. Returns 0 when no thread issues a read.
std::size_t warp_transactions(const ConvConfig& cfg, const DeviceModel& dev, const LaunchPlan& plan,
                              const WarpSite& site);

/// Channels the coalescing report walks: 1 when an H*W plane is a whole number
/// of lines (every channel then has the same line structure), else min(C, 4).
std::size_t channels_simulated(const ConvConfig& cfg, const DeviceModel& dev);

struct CoalescingReport {
  std::size_t transactions_total = 0;
  /// Warp loads that issued at least one read, counted once per simulated channel.
  std::size_t warps_total = 0;
  double transactions_per_warp_mean = 0.0;
  std::size_t perfectly_coalesced_warps = 0;
};

CoalescingReport coalescing_report(const ConvConfig& cfg, const DeviceModel& dev, const LaunchPlan& plan);
CoalescingReport coalescing_report(const ConvConfig& cfg, const DeviceModel& dev);

struct ReuseCounts {
  std::size_t filter_row_reuse = 0;   ///< h_out * w_out
  std::size_t max_element_reuse = 0;  ///< hf * wf
};

ReuseCounts theoretical_reuse(const ConvConfig& cfg);

}  // namespace rowconv
