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

// bench: command-line front end for the convolution harness.
//
//   bench run      --configs presets|<file> [--algos ...] [--batches ...] --out report.csv
//   bench analyze  --configs presets|<file> [--batches ...] --out coalescing.csv
//   bench validate --configs presets|<file> [--algos ...] [--batches ...]
//
// Exit codes: 0 success, 1 validation failure, 2 usage error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rowconv/bench.hpp"
#include "rowconv/errors.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;

struct CommonArgs {
  std::string configs = "presets";
  std::string algos = "naive,gemm,winograd,twostage";
  std::string batches;
  std::size_t workspace_limit = rowconv::kDefaultWorkspaceLimit;
  std::uint64_t seed = 42;
  unsigned workers = 0;
};

std::vector<std::size_t> parse_batches(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(item, &pos);
    if (pos != item.size() || v == 0) throw std::invalid_argument("bad batch size '" + item + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::vector<rowconv::ConvConfig> load_configs(const std::string& source) {
  if (source == "presets") return rowconv::preset_configs();
  return rowconv::parse_config_file(source);
}

rowconv::BenchOptions make_options(const CommonArgs& args) {
  rowconv::BenchOptions opts;
  opts.configs = load_configs(args.configs);
  opts.algorithms = rowconv::parse_algorithm_list(args.algos);
  opts.batch_sizes = parse_batches(args.batches);
  opts.workspace_limit = args.workspace_limit;
  opts.seed = args.seed;
  opts.exec.workers = args.workers;
  return opts;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw rowconv::IoError("cannot open " + path + " for writing");
  out << text;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool with_algos) {
  cmd->add_option("--configs", args.configs, "'presets' or a config CSV file")->capture_default_str();
  if (with_algos) {
    cmd->add_option("--algos", args.algos, "comma-separated: naive,gemm,winograd,twostage")
        ->capture_default_str();
  }
  cmd->add_option("--batches", args.batches, "comma-separated batch sizes (default: each config's n)");
  cmd->add_option("--workspace-limit", args.workspace_limit, "temporary allocation cap in bytes")
      ->capture_default_str();
  cmd->add_option("--seed", args.seed, "seed for generated inputs and filters")->capture_default_str();
  cmd->add_option("--workers", args.workers, "worker threads (0 = all cores)")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convolution algorithm benchmark harness"};
  app.require_subcommand(1);

  CommonArgs run_args;
  std::size_t repeats = 9;
  std::string baseline = "gemm";
  std::string run_out;
  std::string format = "csv";
  auto* run = app.add_subcommand("run", "time algorithms and write a report");
  add_common(run, run_args, true);
  run->add_option("--repeats", repeats, "timed executions per cell")->capture_default_str()
      ->check(CLI::PositiveNumber);
  run->add_option("--baseline", baseline, "algorithm speedups are relative to")->capture_default_str();
  run->add_option("--out", run_out, "report path ('-' for stdout)");
  run->add_option("--format", format, "csv or md")->check(CLI::IsMember({"csv", "md"}))->capture_default_str();

  CommonArgs analyze_args;
  std::string analyze_out;
  auto* analyze = app.add_subcommand("analyze", "launch plans and coalescing model, no timing");
  add_common(analyze, analyze_args, false);
  analyze->add_option("--out", analyze_out, "CSV path ('-' for stdout)");

  CommonArgs validate_args;
  auto* validate = app.add_subcommand("validate", "oracle checks only");
  add_common(validate, validate_args, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  rowconv::BenchOptions opts;
  try {
    if (*run) {
      opts = make_options(run_args);
      opts.repeats = repeats;
      opts.baseline = rowconv::parse_algorithm(baseline);
    } else if (*analyze) {
      opts.configs = load_configs(analyze_args.configs);
      opts.batch_sizes = parse_batches(analyze_args.batches);
    } else {
      opts = make_options(validate_args);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*run) {
      const auto records = rowconv::run_bench(opts);
      if (records.empty()) {
        std::cerr << "error: nothing to report\n";
        return kExitUsage;
      }
      const auto text = format == "csv" ? rowconv::render_csv(records) : rowconv::render_markdown(records);
      write_text(run_out, text);
      bool all_valid = true;
      for (const auto& r : records) {
        if (r.skipped()) {
          std::cerr << "skipped " << r.config << " batch " << r.batch << " " << rowconv::to_string(r.algorithm)
                    << ": " << r.skip_reason << '\n';
        } else if (!r.validated) {
          all_valid = false;
          std::cerr << "FAILED " << r.config << " batch " << r.batch << " " << rowconv::to_string(r.algorithm)
                    << ": max rel error " << r.max_rel_error << '\n';
        }
      }
      return all_valid ? kExitOk : kExitValidation;
    }

    if (*analyze) {
      for (const auto& cfg : opts.configs) {
        if (cfg.stride != 1) std::cerr << "skipped " << cfg.name << ": Unsupported: stride\n";
      }
      write_text(analyze_out, rowconv::render_coalescing_csv(rowconv::analyze_coalescing(opts.configs, opts.batch_sizes)));
      return kExitOk;
    }

    bool all_passed = true;
    for (const auto& row : rowconv::run_validation(opts)) {
      std::printf("%-12s batch %-4zu %-9s ", row.config.c_str(), row.batch,
                  std::string(rowconv::to_string(row.algorithm)).c_str());
      if (!row.skip_reason.empty()) {
        std::printf("skipped (%s)\n", row.skip_reason.c_str());
        continue;
      }
      std::printf("rel_err %.3e (tol %.0e)%s  %s\n", row.max_rel_error, row.tolerance,
                  row.bitwise_match ? (*row.bitwise_match ? " bitwise=yes" : " bitwise=NO") : "",
                  row.passed ? "ok" : "FAIL");
      all_passed = all_passed && row.passed;
    }
    return all_passed ? kExitOk : kExitValidation;
  } catch (const rowconv::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
