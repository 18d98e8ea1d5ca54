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

#include "rowconv/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "rowconv/errors.hpp"
#include "rowconv/reference.hpp"

namespace rowconv {

namespace {

std::string fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

ConvConfig with_batch(ConvConfig cfg, std::size_t batch) {
  cfg.n = batch;
  return cfg;
}

std::vector<std::size_t> batches_for(const ConvConfig& cfg, const std::vector<std::size_t>& sweep) {
  if (sweep.empty()) return {cfg.n};
  return sweep;
}

struct Timing {
  double mean_us = 0.0;
  double min_us = 0.0;
  double stddev_us = 0.0;
};

Timing summarize(const std::vector<double>& samples) {
  Timing t;
  double sum = 0.0;
  for (double s : samples) sum += s;
  t.mean_us = sum / static_cast<double>(samples.size());
  t.min_us = *std::min_element(samples.begin(), samples.end());
  if (samples.size() > 1) {
    double sq = 0.0;
    for (double s : samples) sq += (s - t.mean_us) * (s - t.mean_us);
    t.stddev_us = std::sqrt(sq / static_cast<double>(samples.size() - 1));
  }
  return t;
}

BenchRecord blank_record(const ConvConfig& cfg, Algorithm algo) {
  BenchRecord r;
  r.config = cfg.name;
  r.label = cfg.short_label();
  r.filter_h = cfg.hf;
  r.filter_w = cfg.wf;
  r.algorithm = algo;
  r.batch = cfg.n;
  return r;
}

}  // namespace

std::string_view to_string(Algorithm algo) noexcept {
  switch (algo) {
    case Algorithm::naive: return "naive";
    case Algorithm::gemm: return "gemm";
    case Algorithm::winograd: return "winograd";
    case Algorithm::twostage: return "twostage";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::naive, Algorithm::gemm, Algorithm::winograd, Algorithm::twostage}) {
    if (to_string(a) == name) return a;
  }
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

std::vector<Algorithm> parse_algorithm_list(std::string_view list) {
  std::vector<Algorithm> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto comma = list.find(',', start);
    const auto item = list.substr(start, comma == std::string_view::npos ? list.size() - start : comma - start);
    if (!item.empty()) out.push_back(parse_algorithm(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw std::invalid_argument("empty algorithm list");
  return out;
}

double validation_tolerance(Algorithm algo) noexcept { return algo == Algorithm::winograd ? 1e-3 : 1e-4; }

std::size_t algorithm_workspace_bytes(Algorithm algo, const ConvConfig& cfg) {
  switch (algo) {
    case Algorithm::naive: return 0;
    case Algorithm::gemm: return gemm_workspace_bytes(cfg);
    case Algorithm::winograd: return winograd_workspace_bytes(cfg);
    case Algorithm::twostage: return workspace_bytes(cfg);
  }
  return 0;
}

std::optional<std::string> skip_reason(Algorithm algo, const ConvConfig& cfg, std::size_t workspace_limit) {
  if ((algo == Algorithm::twostage || algo == Algorithm::winograd) && cfg.stride != 1) {
    return "Unsupported: stride";
  }
  if (algo == Algorithm::winograd && (cfg.hf != 3 || cfg.wf != 3)) return "Unsupported: filter size";
  if (algorithm_workspace_bytes(algo, cfg) > workspace_limit) return "WorkspaceExceeded";
  return std::nullopt;
}

ConvOperands make_operands(const ConvConfig& cfg, std::uint64_t seed) {
  return {make_tensor(cfg.input_dims(), fill::Uniform{seed, -1.0f, 1.0f}),
          make_tensor(cfg.filter_dims(), fill::Uniform{seed + 1, -1.0f, 1.0f})};
}

Tensor4 run_algorithm(Algorithm algo, const ConvOperands& ops, const ConvConfig& cfg, const BenchOptions& opts) {
  switch (algo) {
    case Algorithm::naive: return conv_naive(ops.input, ops.filters, cfg, opts.exec);
    case Algorithm::gemm: return conv_gemm(ops.input, ops.filters, cfg, opts.exec);
    case Algorithm::winograd: return conv_winograd_f22(ops.input, ops.filters, cfg, opts.exec);
    case Algorithm::twostage:
      return conv_twostage(ops.input, ops.filters, cfg, opts.device, opts.workspace_limit, opts.exec).output;
  }
  throw std::logic_error("unhandled algorithm");
}

std::vector<BenchRecord> run_bench(const BenchOptions& opts) {
  if (opts.repeats == 0) throw std::invalid_argument("repeats must be >= 1");
  using Clock = std::chrono::steady_clock;
  std::vector<BenchRecord> out;

  for (const ConvConfig& base : opts.configs) {
    validate(base);
    for (std::size_t batch : batches_for(base, opts.batch_sizes)) {
      const ConvConfig cfg = with_batch(base, batch);
      const std::size_t first = out.size();

      std::vector<Algorithm> runnable;
      for (Algorithm algo : opts.algorithms) {
        if (auto reason = skip_reason(algo, cfg, opts.workspace_limit)) {
          BenchRecord r = blank_record(cfg, algo);
          r.skip_reason = *reason;
          r.workspace_bytes = algorithm_workspace_bytes(algo, cfg);
          out.push_back(std::move(r));
        } else {
          runnable.push_back(algo);
        }
      }
      if (runnable.empty()) continue;

      const ConvOperands ops = make_operands(cfg, opts.seed);
      const Tensor4 oracle = conv_naive_f64(ops.input, ops.filters, cfg, opts.exec);

      for (Algorithm algo : runnable) {
        BenchRecord r = blank_record(cfg, algo);
        r.workspace_bytes = algorithm_workspace_bytes(algo, cfg);
        try {
          const Tensor4 result = run_algorithm(algo, ops, cfg, opts);
          r.max_rel_error = max_relative_error(result, oracle);
          r.validated = r.max_rel_error <= validation_tolerance(algo);

          std::vector<double> samples;
          samples.reserve(opts.repeats);
          for (std::size_t i = 0; i < opts.repeats; ++i) {
            const auto t0 = Clock::now();
            const Tensor4 timed = run_algorithm(algo, ops, cfg, opts);
            const auto t1 = Clock::now();
            samples.push_back(std::max(1e-3, std::chrono::duration<double, std::micro>(t1 - t0).count()));
          }
          const Timing t = summarize(samples);
          r.repeats = opts.repeats;
          r.mean_time_us = t.mean_us;
          r.min_time_us = t.min_us;
          r.stddev_us = t.stddev_us;
          if (algo == Algorithm::twostage) {
            r.transactions_per_warp_mean = coalescing_report(cfg, opts.device).transactions_per_warp_mean;
          }
        } catch (const Unsupported& e) {
          r.skip_reason = e.what();
        } catch (const WorkspaceExceeded&) {
          r.skip_reason = "WorkspaceExceeded";
        }
        out.push_back(std::move(r));
      }

      const auto baseline = std::find_if(out.begin() + static_cast<std::ptrdiff_t>(first), out.end(),
                                         [&](const BenchRecord& r) {
                                           return r.algorithm == opts.baseline && !r.skipped();
                                         });
      if (baseline != out.end()) {
        const double base_mean = baseline->mean_time_us;
        for (auto it = out.begin() + static_cast<std::ptrdiff_t>(first); it != out.end(); ++it) {
          if (!it->skipped()) it->speedup_vs_baseline = base_mean / it->mean_time_us;
        }
      }
    }
  }
  return out;
}

std::string render_csv(const std::vector<BenchRecord>& records) {
  std::ostringstream os;
  os << kBenchCsvHeader << '\n';
  for (const auto& r : records) {
    os << r.config << ',' << to_string(r.algorithm) << ',' << r.batch << ',' << r.repeats << ',';
    if (r.skipped()) {
      os << ",,,,skipped: " << r.skip_reason << ',' << r.workspace_bytes << ",\n";
      continue;
    }
    os << fixed(r.mean_time_us, 3) << ',' << fixed(r.min_time_us, 3) << ',' << fixed(r.stddev_us, 3) << ',';
    if (r.speedup_vs_baseline) os << fixed(*r.speedup_vs_baseline, 4);
    os << ',' << (r.validated ? "true" : "false") << ',' << r.workspace_bytes << ',';
    if (r.transactions_per_warp_mean) os << fixed(*r.transactions_per_warp_mean, 4);
    os << '\n';
  }
  return os.str();
}

std::string render_markdown(const std::vector<BenchRecord>& records) {
  std::map<std::pair<std::size_t, std::size_t>, std::vector<const BenchRecord*>> groups;
  for (const auto& r : records) groups[{r.filter_h, r.filter_w}].push_back(&r);

  std::ostringstream os;
  bool first = true;
  for (const auto& [size, rows] : groups) {
    if (!first) os << '\n';
    first = false;
    os << "### " << size.first << 'x' << size.second << " filters\n\n";
    os << "| Config | Layer | Batch | Algorithm | Mean (us) | Min (us) | Stddev (us) | Speedup | Validated |\n";
    os << "|---|---|---:|---|---:|---:|---:|---:|---|\n";
    for (const BenchRecord* r : rows) {
      os << "| " << r->config << " | " << r->label << " | " << r->batch << " | " << to_string(r->algorithm)
         << " | ";
      if (r->skipped()) {
        os << "- | - | - | - | skipped (" << r->skip_reason << ") |\n";
        continue;
      }
      os << fixed(r->mean_time_us, 1) << " | " << fixed(r->min_time_us, 1) << " | " << fixed(r->stddev_us, 1)
         << " | " << (r->speedup_vs_baseline ? fixed(*r->speedup_vs_baseline, 2) + "x" : std::string("-"))
         << " | " << (r->validated ? "yes" : "no") << " |\n";
    }
  }
  return os.str();
}

void emit_report(const std::vector<BenchRecord>& records, ReportFormat format, const std::filesystem::path& path) {
  if (records.empty()) throw Error("no benchmark records to report");
  const std::string text = format == ReportFormat::csv ? render_csv(records) : render_markdown(records);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<CoalescingRow> analyze_coalescing(const std::vector<ConvConfig>& configs,
                                              const std::vector<std::size_t>& batch_sizes,
                                              const DeviceModel& dev) {
  std::vector<CoalescingRow> rows;
  for (const ConvConfig& base : configs) {
    if (base.stride != 1) continue;
    for (std::size_t batch : batches_for(base, batch_sizes)) {
      const ConvConfig cfg = with_batch(base, batch);
      CoalescingRow row;
      row.config = cfg.name;
      row.batch = batch;
      row.plan = plan_launch(cfg, dev);
      row.report = coalescing_report(cfg, dev, row.plan);
      row.reuse = theoretical_reuse(cfg);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string render_coalescing_csv(const std::vector<CoalescingRow>& rows) {
  std::ostringstream os;
  os << kCoalescingCsvHeader << '\n';
  for (const auto& r : rows) {
    os << r.config << ',' << r.batch << ',' << r.plan.blocks << ',' << r.plan.threads_per_block << ','
       << r.plan.split_per_filter_row << ',' << r.plan.dot_products_per_thread << ',' << r.report.warps_total
       << ',' << r.report.transactions_total << ',' << fixed(r.report.transactions_per_warp_mean, 4) << ','
       << r.report.perfectly_coalesced_warps << ',' << r.reuse.filter_row_reuse << ','
       << r.reuse.max_element_reuse << '\n';
  }
  return os.str();
}

std::vector<ValidationRow> run_validation(const BenchOptions& opts) {
  std::vector<ValidationRow> rows;
  for (const ConvConfig& base : opts.configs) {
    validate(base);
    for (std::size_t batch : batches_for(base, opts.batch_sizes)) {
      const ConvConfig cfg = with_batch(base, batch);
      std::optional<ConvOperands> ops;
      std::optional<Tensor4> oracle;
      std::optional<Tensor4> naive;
      for (Algorithm algo : opts.algorithms) {
        ValidationRow row;
        row.config = cfg.name;
        row.batch = batch;
        row.algorithm = algo;
        row.tolerance = validation_tolerance(algo);
        if (auto reason = skip_reason(algo, cfg, opts.workspace_limit)) {
          row.skip_reason = *reason;
          row.passed = true;
          rows.push_back(std::move(row));
          continue;
        }
        if (!ops) {
          ops = make_operands(cfg, opts.seed);
          oracle = conv_naive_f64(ops->input, ops->filters, cfg, opts.exec);
        }
        const Tensor4 result = run_algorithm(algo, *ops, cfg, opts);
        row.max_rel_error = max_relative_error(result, *oracle);
        row.passed = row.max_rel_error <= row.tolerance;
        if (algo == Algorithm::twostage) {
          if (!naive) naive = conv_naive(ops->input, ops->filters, cfg, opts.exec);
          row.bitwise_match = bitwise_equal(result, *naive);
          row.passed = row.passed && *row.bitwise_match;
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

}  // namespace rowconv
