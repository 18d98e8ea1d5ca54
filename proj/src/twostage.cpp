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

#include "rowconv/twostage.hpp"

#include <algorithm>
#include <atomic>
#include <string>

#include "rowconv/errors.hpp"
#include "rowconv/reference.hpp"

namespace rowconv {

namespace {

void require_stride_one(const ConvConfig& cfg) {
  if (cfg.stride != 1) throw Unsupported("Unsupported: stride " + std::to_string(cfg.stride));
}

std::size_t partial_bytes(const ConvConfig& cfg) {
  const auto out = output_dims(cfg);
  return sizeof(float) * cfg.hf * cfg.wf * cfg.n * cfg.m * out.h * out.w;
}

// Destination of stage 1: plane (k, n, m) starts at ((k * N + n) * M + m) * plane.
// With k fixed at 0 this is exactly the NCHW output tensor.
struct PartialLayout {
  std::span<float> data;
  std::size_t n, m, ho, wo;
  float* plane(std::size_t k, std::size_t img, std::size_t filter) const {
    return data.data() + ((k * n + img) * m + filter) * ho * wo;
  }
};

// One thread block: stage the filter row, then compute every dot product in
// [item_begin, item_end). Items are (n, y, x) with x fastest; each output row
// segment is accumulated channel by channel so every element sees c ascending.
void run_block(const Tensor4& input, const Tensor4& filters, const ConvConfig& cfg, const BlockSite& site,
               const PartialLayout& dst, std::vector<float>& row_buf) {
  const std::size_t yf = site.row / cfg.wf;
  const std::size_t xf = site.row % cfg.wf;
  row_buf.resize(cfg.c);
  for (std::size_t c = 0; c < cfg.c; ++c) row_buf[c] = filters(site.filter, c, yf, xf);

  const std::size_t plane = dst.ho * dst.wo;
  const auto h = static_cast<std::ptrdiff_t>(cfg.h);
  const auto w = static_cast<std::ptrdiff_t>(cfg.w);
  const std::ptrdiff_t dx = static_cast<std::ptrdiff_t>(xf) - static_cast<std::ptrdiff_t>(cfg.pad_w);

  std::size_t item = site.item_begin;
  while (item < site.item_end) {
    const std::size_t img = item / plane;
    const std::size_t y = (item % plane) / dst.wo;
    const std::size_t x0 = item % dst.wo;
    const std::size_t x1 = std::min(dst.wo, x0 + (site.item_end - item));
    float* out = dst.plane(site.row, img, site.filter) + y * dst.wo;
    std::fill(out + x0, out + x1, 0.0f);

    const std::ptrdiff_t yi = static_cast<std::ptrdiff_t>(y + yf) - static_cast<std::ptrdiff_t>(cfg.pad_h);
    const bool row_inside = yi >= 0 && yi < h;
    for (std::size_t c = 0; c < cfg.c; ++c) {
      const float weight = row_buf[c];
      const float* in = input.plane(img, c).data() + (row_inside ? yi * w : 0);
      for (std::size_t x = x0; x < x1; ++x) {
        const std::ptrdiff_t xi = static_cast<std::ptrdiff_t>(x) + dx;
        const float v = row_inside && xi >= 0 && xi < w ? in[xi] : 0.0f;
        out[x] += v * weight;
      }
    }
    item += x1 - x0;
  }
}

RunStats run_stage1(const Tensor4& input, const Tensor4& filters, const ConvConfig& cfg, const LaunchPlan& plan,
                    const PartialLayout& dst, ExecOptions opts) {
  std::atomic<std::size_t> loads{0};
  std::atomic<std::size_t> tasks{0};
  thread_local std::vector<float> row_buf;
  parallel_for(plan.blocks, opts.workers, [&](std::size_t b) {
    run_block(input, filters, cfg, block_site(cfg, plan, b), dst, row_buf);
    loads.fetch_add(1, std::memory_order_relaxed);
    tasks.fetch_add(1, std::memory_order_relaxed);
  });
  RunStats stats;
  stats.stage1_tasks_run = tasks.load();
  stats.filter_row_global_loads = loads.load();
  return stats;
}

}  // namespace

PartialSums::PartialSums(const ConvConfig& cfg, std::size_t limit) {
  const auto out = output_dims(cfg);
  const std::size_t bytes = partial_bytes(cfg);
  if (bytes > limit) throw WorkspaceExceeded(bytes, limit);
  k_ = cfg.hf * cfg.wf;
  n_ = cfg.n;
  m_ = cfg.m;
  ho_ = out.h;
  wo_ = out.w;
  data_.assign(bytes / sizeof(float), 0.0f);
}

std::size_t workspace_bytes(const ConvConfig& cfg) {
  if (cfg.hf == 1 && cfg.wf == 1) return 0;
  return partial_bytes(cfg);
}

Stage1Result stage1_scalar_prods(const Tensor4& input, const Tensor4& filters, const ConvConfig& cfg,
                                 const LaunchPlan& plan, const DeviceModel& dev, std::size_t workspace_limit,
                                 ExecOptions opts) {
  require_stride_one(cfg);
  check_conv_shapes(input, filters, cfg);
  validate_plan(cfg, dev, plan);
  PartialSums partials(cfg, workspace_limit);
  const PartialLayout layout{partials.data(), cfg.n, cfg.m, partials.out_h(), partials.out_w()};
  RunStats stats = run_stage1(input, filters, cfg, plan, layout, opts);
  stats.workspace_bytes = partials.bytes();
  return {std::move(partials), stats};
}

Tensor4 stage2_sum(const PartialSums& partials, const ConvConfig& cfg, ExecOptions opts) {
  const auto out_dims = output_dims(cfg);
  if (partials.rows() != cfg.hf * cfg.wf || partials.images() != cfg.n || partials.filters() != cfg.m ||
      partials.out_h() != out_dims.h || partials.out_w() != out_dims.w) {
    throw ShapeMismatch("partial sums do not match the config");
  }
  Tensor4 out(cfg.output_dims4());
  parallel_for(cfg.n * cfg.m, opts.workers, [&](std::size_t task) {
    const std::size_t n = task / cfg.m;
    const std::size_t m = task % cfg.m;
    auto dst = out.plane(n, m);
    std::fill(dst.begin(), dst.end(), 0.0f);
    for (std::size_t k = 0; k < partials.rows(); ++k) {
      const auto src = partials.plane(k, n, m);
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    }
  });
  return out;
}

TwoStageResult conv_twostage(const Tensor4& input, const Tensor4& filters, const ConvConfig& cfg,
                             const DeviceModel& dev, std::size_t workspace_limit, ExecOptions opts) {
  require_stride_one(cfg);
  return conv_twostage(input, filters, cfg, plan_launch(cfg, dev), dev, workspace_limit, opts);
}

TwoStageResult conv_twostage(const Tensor4& input, const Tensor4& filters, const ConvConfig& cfg,
                             const LaunchPlan& plan, const DeviceModel& dev, std::size_t workspace_limit,
                             ExecOptions opts) {
  require_stride_one(cfg);
  check_conv_shapes(input, filters, cfg);
  validate_plan(cfg, dev, plan);

  if (cfg.hf == 1 && cfg.wf == 1) {
    Tensor4 out(cfg.output_dims4());
    const PartialLayout layout{out.data(), cfg.n, cfg.m, out.dims().h, out.dims().w};
    RunStats stats = run_stage1(input, filters, cfg, plan, layout, opts);
    stats.stage2_invoked = false;
    stats.workspace_bytes = 0;
    return {std::move(out), stats};
  }

  auto [partials, stats] = stage1_scalar_prods(input, filters, cfg, plan, dev, workspace_limit, opts);
  Tensor4 out = stage2_sum(partials, cfg, opts);
  stats.stage2_invoked = true;
  return {std::move(out), stats};
}

}  // namespace rowconv
