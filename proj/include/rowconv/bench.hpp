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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rowconv/config.hpp"
#include "rowconv/execmodel.hpp"
#include "rowconv/twostage.hpp"

namespace rowconv {

enum class Algorithm { naive, gemm, winograd, twostage };

std::string_view to_string(Algorithm algo) noexcept;
/// Throws std::invalid_argument on unknown names.
Algorithm parse_algorithm(std::string_view name);
/// Comma-separated list, e.g. "gemm,twostage".
std::vector<Algorithm> parse_algorithm_list(std::string_view list);

/// Largest accepted max_relative_error against the double-precision oracle.
double validation_tolerance(Algorithm algo) noexcept;

/// Why `algo` cannot run `cfg` under `workspace_limit`, or nullopt if it can.
/// Reasons are "Unsupported: stride", "Unsupported: filter size" or "WorkspaceExceeded".
std::optional<std::string> skip_reason(Algorithm algo, const ConvConfig& cfg, std::size_t workspace_limit);

/// Temporary bytes `algo` allocates for `cfg`.
std::size_t algorithm_workspace_bytes(Algorithm algo, const ConvConfig& cfg);

/// One (config, batch, algorithm) cell of a benchmark run. A row with a
/// non-empty skip reason was not executed and carries no timings.
struct BenchRecord {
  std::string config;
  std::string label;  ///< "[input size]-[filters]-[depth]"
  std::size_t filter_h = 0;
  std::size_t filter_w = 0;
  Algorithm algorithm = Algorithm::naive;
  std::size_t batch = 0;
  std::size_t repeats = 0;
  double mean_time_us = 0.0;
  double min_time_us = 0.0;
  double stddev_us = 0.0;
  std::optional<double> speedup_vs_baseline;
  bool validated = false;
  double max_rel_error = 0.0;
  std::size_t workspace_bytes = 0;
  std::optional<double> transactions_per_warp_mean;
  std::string skip_reason;

  bool skipped() const noexcept { return !skip_reason.empty(); }
};

struct BenchOptions {
  std::vector<ConvConfig> configs;
  std::vector<Algorithm> algorithms = {Algorithm::naive, Algorithm::gemm, Algorithm::winograd,
                                       Algorithm::twostage};
  /// Each config is run once per batch size; empty keeps each config's own n.
  std::vector<std::size_t> batch_sizes;
  std::size_t repeats = 9;
  std::size_t workspace_limit = kDefaultWorkspaceLimit;
  std::uint64_t seed = 42;
  Algorithm baseline = Algorithm::gemm;
  DeviceModel device;
  ExecOptions exec;
};

/// Times every (config x batch x algorithm) cell: seeded inputs, one discarded
/// warm-up, `repeats` timed calls, and a check of the warm-up output against
/// conv_naive_f64. Cells whose preconditions fail become skip rows.
std::vector<BenchRecord> run_bench(const BenchOptions& opts);

enum class ReportFormat { csv, markdown };

inline constexpr char kBenchCsvHeader[] =
    "config,algorithm,batch,repeats,mean_us,min_us,stddev_us,speedup,validated,workspace_bytes,txn_per_warp";

std::string render_csv(const std::vector<BenchRecord>& records);
/// One table per filter size, in ascending filter size.
std::string render_markdown(const std::vector<BenchRecord>& records);

/// Throws Error for an empty record list (nothing is written) and IoError if
/// the file cannot be written.
void emit_report(const std::vector<BenchRecord>& records, ReportFormat format, const std::filesystem::path& path);

/// Execution-model figures for one config, as written by `bench analyze`.
struct CoalescingRow {
  std::string config;
  std::size_t batch = 0;
  LaunchPlan plan;
  CoalescingReport report;
  ReuseCounts reuse;
};

inline constexpr char kCoalescingCsvHeader[] =
    "config,batch,blocks,threads_per_block,split,dot_products_per_thread,warps_total,"
    "transactions_total,txn_per_warp,perfectly_coalesced_warps,filter_row_reuse,max_element_reuse";

/// Stride != 1 configs are left out.
std::vector<CoalescingRow> analyze_coalescing(const std::vector<ConvConfig>& configs,
                                              const std::vector<std::size_t>& batch_sizes,
                                              const DeviceModel& dev = {});
std::string render_coalescing_csv(const std::vector<CoalescingRow>& rows);

/// Oracle check of one (config, batch, algorithm) cell, as run by `bench validate`.
struct ValidationRow {
  std::string config;
  std::size_t batch = 0;
  Algorithm algorithm = Algorithm::naive;
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  /// twostage only: bitwise equality with conv_naive.
  std::optional<bool> bitwise_match;
  bool passed = false;
  std::string skip_reason;
};

std::vector<ValidationRow> run_validation(const BenchOptions& opts);

/// The input and filters run_bench and run_validation use for a config.
struct ConvOperands {
  Tensor4 input;
  Tensor4 filters;
};
ConvOperands make_operands(const ConvConfig& cfg, std::uint64_t seed);

/// Calls the named algorithm with library defaults for everything else.
Tensor4 run_algorithm(Algorithm algo, const ConvOperands& ops, const ConvConfig& cfg,
                      const BenchOptions& opts);

}  // namespace rowconv
