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

#include "rowconv/execmodel.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "rowconv/errors.hpp"

namespace rowconv {

namespace {

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

void require_stride_one(const ConvConfig& cfg) {
  if (cfg.stride != 1) throw Unsupported("Unsupported: stride " + std::to_string(cfg.stride));
}

// Rounds up to whole warps without crossing the device limit.
std::size_t warp_round(std::size_t threads, const DeviceModel& dev) {
  const std::size_t rounded = ceil_div(threads, dev.warp_width) * dev.warp_width;
  if (rounded <= dev.max_threads_per_block) return rounded;
  const std::size_t floor = dev.max_threads_per_block / dev.warp_width * dev.warp_width;
  return floor == 0 ? dev.max_threads_per_block : floor;
}

}  // namespace

void validate(const DeviceModel& dev) {
  if (dev.warp_width == 0 || dev.line_bytes == 0 || dev.max_threads_per_block == 0 ||
      dev.element_bytes == 0) {
    throw InvalidShape("device model fields must be positive");
  }
  if (dev.line_bytes % dev.element_bytes != 0) {
    throw InvalidShape("line size must be a multiple of the element size");
  }
}

std::size_t work_per_filter_row(const ConvConfig& cfg) {
  const auto out = output_dims(cfg);
  return cfg.n * out.h * out.w;
}

LaunchPlan plan_launch(const ConvConfig& cfg, const DeviceModel& dev) {
  require_stride_one(cfg);
  validate(dev);
  const std::size_t work = work_per_filter_row(cfg);
  const std::size_t split = ceil_div(work, dev.max_threads_per_block);
  const std::size_t threads = warp_round(std::min(work, dev.max_threads_per_block), dev);
  LaunchPlan plan;
  plan.split_per_filter_row = split;
  plan.threads_per_block = threads;
  plan.dot_products_per_thread = ceil_div(work, split * threads);
  plan.blocks = cfg.m * cfg.hf * cfg.wf * split;
  return plan;
}

LaunchPlan make_plan(const ConvConfig& cfg, const DeviceModel& dev, std::size_t split,
                     std::size_t threads_per_block) {
  require_stride_one(cfg);
  validate(dev);
  if (split == 0 || threads_per_block == 0) throw InvalidPlan("split and block size must be >= 1");
  if (threads_per_block > dev.max_threads_per_block) {
    throw InvalidPlan("block size " + std::to_string(threads_per_block) + " above device limit");
  }
  const std::size_t work = work_per_filter_row(cfg);
  LaunchPlan plan;
  plan.split_per_filter_row = split;
  plan.threads_per_block = warp_round(threads_per_block, dev);
  plan.dot_products_per_thread = std::max<std::size_t>(1, ceil_div(work, split * plan.threads_per_block));
  plan.blocks = cfg.m * cfg.hf * cfg.wf * split;
  return plan;
}

void validate_plan(const ConvConfig& cfg, const DeviceModel& dev, const LaunchPlan& plan) {
  require_stride_one(cfg);
  validate(dev);
  if (plan.split_per_filter_row == 0 || plan.threads_per_block == 0 ||
      plan.dot_products_per_thread == 0) {
    throw InvalidPlan("plan fields must be >= 1");
  }
  if (plan.blocks != cfg.m * cfg.hf * cfg.wf * plan.split_per_filter_row) {
    throw InvalidPlan("block count must equal m * hf * wf * split");
  }
  if (plan.threads_per_block > dev.max_threads_per_block) {
    throw InvalidPlan("threads per block above device limit");
  }
  const std::size_t work = work_per_filter_row(cfg);
  if (plan.split_per_filter_row * plan.items_per_block() < work) {
    throw InvalidPlan("plan does not cover all " + std::to_string(work) + " dot products per row");
  }
}

BlockSite block_site(const ConvConfig& cfg, const LaunchPlan& plan, std::size_t index) {
  const std::size_t rows = cfg.hf * cfg.wf;
  const std::size_t filter_row = index / plan.split_per_filter_row;
  BlockSite site;
  site.filter = filter_row / rows;
  site.row = filter_row % rows;
  site.split_index = index % plan.split_per_filter_row;
  const std::size_t work = work_per_filter_row(cfg);
  site.item_begin = std::min(work, site.split_index * plan.items_per_block());
  site.item_end = std::min(work, site.item_begin + plan.items_per_block());
  return site;
}

std::size_t warp_transactions(const ConvConfig& cfg, const DeviceModel& dev, const LaunchPlan& plan,
                              const WarpSite& site) {
  const auto out = output_dims(cfg);
  const std::size_t work = cfg.n * out.h * out.w;
  const std::size_t chunk_begin = site.split_index * plan.items_per_block();
  const std::size_t chunk_end = std::min(work, chunk_begin + plan.items_per_block());
  const std::ptrdiff_t dy = static_cast<std::ptrdiff_t>(site.row / cfg.wf) - static_cast<std::ptrdiff_t>(cfg.pad_h);
  const std::ptrdiff_t dx = static_cast<std::ptrdiff_t>(site.row % cfg.wf) - static_cast<std::ptrdiff_t>(cfg.pad_w);
  const std::size_t elems_per_line = dev.line_bytes / dev.element_bytes;

  const std::size_t first_thread = site.warp * dev.warp_width;
  const std::size_t last_thread = std::min(plan.threads_per_block, first_thread + dev.warp_width);

  // In-bounds addresses grow strictly with the lane index, so distinct lines
  // are the number of line changes along the warp.
  std::size_t lines = 0;
  std::size_t previous = std::numeric_limits<std::size_t>::max();
  for (std::size_t t = first_thread; t < last_thread; ++t) {
    const std::size_t item = chunk_begin + t + site.iteration * plan.threads_per_block;
    if (item >= chunk_end) break;
    const std::size_t x = item % out.w;
    const std::size_t y = (item / out.w) % out.h;
    const std::size_t n = item / (out.w * out.h);
    const std::ptrdiff_t yi = static_cast<std::ptrdiff_t>(y) + dy;
    const std::ptrdiff_t xi = static_cast<std::ptrdiff_t>(x) + dx;
    if (yi < 0 || xi < 0 || yi >= static_cast<std::ptrdiff_t>(cfg.h) ||
        xi >= static_cast<std::ptrdiff_t>(cfg.w)) {
      continue;
    }
    const std::size_t addr = ((n * cfg.c + site.channel) * cfg.h + static_cast<std::size_t>(yi)) * cfg.w +
                             static_cast<std::size_t>(xi);
    const std::size_t line = addr / elems_per_line;
    if (line != previous) {
      ++lines;
      previous = line;
    }
  }
  return lines;
}

std::size_t channels_simulated(const ConvConfig& cfg, const DeviceModel& dev) {
  if ((cfg.h * cfg.w * dev.element_bytes) % dev.line_bytes == 0) return 1;
  return std::min<std::size_t>(cfg.c, 4);
}

CoalescingReport coalescing_report(const ConvConfig& cfg, const DeviceModel& dev, const LaunchPlan& plan) {
  validate_plan(cfg, dev, plan);
  const std::size_t warps_per_block = ceil_div(plan.threads_per_block, dev.warp_width);
  const std::size_t channels = channels_simulated(cfg, dev);

  CoalescingReport report;
  WarpSite site;
  for (site.row = 0; site.row < cfg.hf * cfg.wf; ++site.row) {
    for (site.split_index = 0; site.split_index < plan.split_per_filter_row; ++site.split_index) {
      for (site.iteration = 0; site.iteration < plan.dot_products_per_thread; ++site.iteration) {
        for (site.warp = 0; site.warp < warps_per_block; ++site.warp) {
          for (site.channel = 0; site.channel < channels; ++site.channel) {
            const std::size_t lines = warp_transactions(cfg, dev, plan, site);
            if (lines == 0) continue;
            report.transactions_total += lines;
            report.warps_total += 1;
            if (lines == 1) report.perfectly_coalesced_warps += 1;
          }
        }
      }
    }
  }
  // Each filter's blocks replay the same loads.
  report.transactions_total *= cfg.m;
  report.warps_total *= cfg.m;
  report.perfectly_coalesced_warps *= cfg.m;
  if (report.warps_total > 0) {
    report.transactions_per_warp_mean =
        static_cast<double>(report.transactions_total) / static_cast<double>(report.warps_total);
  }
  return report;
}

CoalescingReport coalescing_report(const ConvConfig& cfg, const DeviceModel& dev) {
  return coalescing_report(cfg, dev, plan_launch(cfg, dev));
}

ReuseCounts theoretical_reuse(const ConvConfig& cfg) {
  require_stride_one(cfg);
  return {filter_row_reuse(cfg), cfg.hf * cfg.wf};
}

}  // namespace rowconv
