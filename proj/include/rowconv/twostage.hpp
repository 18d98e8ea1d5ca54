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
#include "rowconv/execmodel.hpp"
#include "rowconv/parallel.hpp"
#include "rowconv/tensor.hpp"

namespace rowconv {

inline constexpr std::size_t kDefaultWorkspaceLimit = std::size_t{1} << 30;

/// Stage-1 output: one h_out x w_out plane per (filter row k, image n, filter m),
/// stored k-outermost, then n, m, y, x. k = yf * wf + xf.
class PartialSums {
 public:
  /// Throws WorkspaceExceeded if the buffer would exceed `limit` bytes.
  PartialSums(const ConvConfig& cfg, std::size_t limit = kDefaultWorkspaceLimit);

  std::size_t rows() const noexcept { return k_; }
  std::size_t images() const noexcept { return n_; }
  std::size_t filters() const noexcept { return m_; }
  std::size_t out_h() const noexcept { return ho_; }
  std::size_t out_w() const noexcept { return wo_; }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t bytes() const noexcept { return data_.size() * sizeof(float); }

  std::size_t offset(std::size_t k, std::size_t n, std::size_t m) const noexcept {
    return ((k * n_ + n) * m_ + m) * ho_ * wo_;
  }
  std::span<float> plane(std::size_t k, std::size_t n, std::size_t m) noexcept {
    return std::span<float>(data_).subspan(offset(k, n, m), ho_ * wo_);
  }
  std::span<const float> plane(std::size_t k, std::size_t n, std::size_t m) const noexcept {
    return std::span<const float>(data_).subspan(offset(k, n, m), ho_ * wo_);
  }
  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }

 private:
  std::size_t k_, n_, m_, ho_, wo_;
  std::vector<float> data_;
};

struct RunStats {
  std::size_t stage1_tasks_run = 0;
  bool stage2_invoked = false;
  /// Times a block copied its filter row into its local buffer.
  std::size_t filter_row_global_loads = 0;
  std::size_t workspace_bytes = 0;
};

/// 4 * hf * wf * n * m * h_out * w_out, or 0 for 1x1 filters (no temporaries).
std::size_t workspace_bytes(const ConvConfig& cfg);

struct Stage1Result {
  PartialSums partials;
  RunStats stats;
};

/// Dot products of every filter row with the input rows it meets, channel
/// order ascending. One task per plan block; the result does not depend on
/// the plan or on the worker count.
Stage1Result stage1_scalar_prods(const Tensor4& input, const Tensor4& filters, const ConvConfig& cfg,
                                 const LaunchPlan& plan, const DeviceModel& dev = {},
                                 std::size_t workspace_limit = kDefaultWorkspaceLimit,
                                 ExecOptions opts = {});

/// Sums the hf*wf partial planes of each (n, m) pair, k ascending.
Tensor4 stage2_sum(const PartialSums& partials, const ConvConfig& cfg, ExecOptions opts = {});

struct TwoStageResult {
  Tensor4 output;
  RunStats stats;
};

/// Full convolution. 1x1 filters take the fused path: stage 1 writes the NCHW
/// output directly and stage 2 is skipped. Stride 1 only.
TwoStageResult conv_twostage(const Tensor4& input, const Tensor4& filters, const ConvConfig& cfg,
                             const DeviceModel& dev = {}, std::size_t workspace_limit = kDefaultWorkspaceLimit,
                             ExecOptions opts = {});

/// As above with a caller-chosen launch plan.
TwoStageResult conv_twostage(const Tensor4& input, const Tensor4& filters, const ConvConfig& cfg,
                             const LaunchPlan& plan, const DeviceModel& dev = {},
                             std::size_t workspace_limit = kDefaultWorkspaceLimit, ExecOptions opts = {});

}  // namespace rowconv
