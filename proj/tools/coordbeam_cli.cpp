// Copyright 2026 The coordbeam Authors
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

// coordbeam: solve, sweep and validate from the command line.
//
// Exit codes: 0 success (solve: converged), 2 solve stopped at the
// iteration cap or on an inexact subproblem, 3 validation or recheck
// failure, 1 any other error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "coordbeam/algorithm.hpp"
#include "coordbeam/io.hpp"
#include "coordbeam/sim.hpp"
#include "coordbeam/validation.hpp"

namespace {

using namespace coordbeam;

constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitValidation = 3;

struct SolveArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string channels_file;
  std::string out;
  std::string format;
  bool recheck = false;
};

struct SweepArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format;
  std::optional<int> realizations;
  std::vector<std::string> strategies;
};

struct ValidateArgs {
  std::string suite = "all";
  std::uint64_t seed = 1;
  std::string out;
};

int worker_threads() {
  const char* env = std::getenv("COORDBEAM_THREADS");
  if (env == nullptr || *env == '\0') {
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) {
    throw std::invalid_argument("COORDBEAM_THREADS must be a positive integer, got '" +
                                std::string(env) + "'");
  }
  return static_cast<int>(n);
}

std::string sibling_path(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  const std::string stem = p.stem().string();
  return (p.parent_path() / (stem + suffix)).string();
}

int cmd_recheck_file(const std::string& path) {
  const io::RecheckReport rep = io::recheck_result(io::read_file(path));
  if (rep.ok) {
    std::printf("recheck ok: %s (max relative error %.3g)\n", path.c_str(), rep.max_error);
    return 0;
  }
  std::fprintf(stderr, "recheck FAILED: %s: %s differs (max relative error %.3g)\n",
               path.c_str(), rep.field.c_str(), rep.max_error);
  return kExitValidation;
}

int cmd_solve(const SolveArgs& args) {
  const io::RunConfig rc = io::load_run_config(args.config);
  const std::uint64_t seed = args.seed.value_or(rc.experiment.seed);
  ChannelSet channels;
  io::ResultContext ctx;
  ctx.seed = seed;
  if (!args.channels_file.empty()) {
    channels = io::load_channels(args.channels_file, rc.system);
    ctx.channel_source = args.channels_file;
  } else {
    channels = gen_channels(seed, rc.system);
    ctx.channel_source = "generated";
  }
  const SolveResult result = run(rc.system, channels, rc.solver);

  std::string format = !args.format.empty() ? args.format : rc.output.format;
  if (format.empty()) format = "json";
  std::string out = !args.out.empty() ? args.out : rc.output.path;
  if (out.empty()) out = format == "json" ? "result.json" : "power_profile.csv";

  std::ostringstream profile;
  io::write_power_profile_csv(profile, rc.system, result.antenna_power);
  if (format == "json") {
    io::write_file(out, io::result_json(rc.system, channels, rc.solver, result, ctx));
    io::write_file(sibling_path(out, "_power.csv"), profile.str());
  } else {
    io::write_file(out, profile.str());
  }

  std::printf("status %s after %d iterations\n", to_string(result.status).c_str(),
              result.iterations);
  std::printf("sum_rate %.10g\n", result.sum_rate);
  if (!result.switched_off.empty()) {
    std::printf("switched off users:");
    for (int k : result.switched_off) std::printf(" %d", k + 1);
    std::printf("\n");
  }
  std::printf("wrote %s\n", out.c_str());

  if (args.recheck) {
    if (format != "json") throw std::invalid_argument("--recheck needs --format json");
    const int code = cmd_recheck_file(out);
    if (code != 0) return code;
  }
  return result.status == SolveStatus::kConverged ? 0 : kExitNotConverged;
}

int cmd_sweep(const SweepArgs& args) {
  const io::RunConfig rc = io::load_run_config(args.config);
  ExperimentSpec spec;
  spec.config = rc.system;
  spec.seed = args.seed.value_or(rc.experiment.seed);
  spec.num_realizations = args.realizations.value_or(rc.experiment.realizations);
  spec.snr_grid_db = rc.experiment.snr_grid_db;
  if (spec.snr_grid_db.empty()) {
    throw io::ConfigError(args.config + ": field 'experiment.snr_grid_db': required for sweep");
  }
  if (!args.strategies.empty()) {
    for (const auto& s : args.strategies) spec.strategies.push_back(parse_strategy(s));
  } else if (!rc.experiment.strategies.empty()) {
    spec.strategies = rc.experiment.strategies;
  } else {
    spec.strategies = {Strategy::kAlgorithmI, Strategy::kWeightedMse, Strategy::kZf,
                       Strategy::kMrt};
  }
  spec.solve_options = rc.solver;
  spec.threads = worker_threads();

  const SweepTable table = run_sweep(spec);

  std::string format = !args.format.empty() ? args.format : rc.output.format;
  if (format.empty()) format = "csv";
  std::string out = !args.out.empty() ? args.out : rc.output.path;
  if (out.empty()) out = format == "csv" ? "sweep.csv" : "sweep.json";
  if (format == "csv") {
    std::ostringstream csv;
    write_sweep_csv(csv, table);
    io::write_file(out, csv.str());
  } else {
    io::write_file(out, io::sweep_json(table, spec));
  }

  std::printf("%8s  %-13s %12s %12s %7s %7s %7s\n", "snr_db", "strategy", "mean_rate", "std_rate",
              "scored", "failed", "capped");
  for (const auto& row : table.rows) {
    std::printf("%8.2f  %-13s %12.6f %12.6f %7d %7d %7d\n", row.snr_db,
                to_string(row.strategy).c_str(), row.mean_sum_rate, row.std_sum_rate,
                row.num_scored, row.num_failed, row.num_capped);
  }
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

int cmd_validate(const ValidateArgs& args) {
  std::vector<std::string> names;
  if (args.suite == "all") {
    for (auto n : validation::kSuiteNames) names.emplace_back(n);
  } else {
    names.push_back(args.suite);
  }
  std::vector<validation::SuiteReport> reports;
  for (const auto& n : names) {
    reports.push_back(validation::run_suite(n, args.seed));
    const auto& rep = reports.back();
    std::fprintf(stderr, "suite %-10s %s\n", rep.suite.c_str(), rep.ok() ? "PASS" : "FAIL");
    if (!rep.ok()) {
      const auto& f = *rep.first_failure;
      std::fprintf(stderr, "  first failing case %d (seed %llu): %s\n  inputs: %s\n",
                   f.case_index, static_cast<unsigned long long>(f.seed), f.detail.c_str(),
                   f.inputs.c_str());
    }
  }
  const std::string doc = io::validation_json(reports);
  if (args.out.empty()) {
    std::fputs(doc.c_str(), stdout);
  } else {
    io::write_file(args.out, doc);
  }
  for (const auto& rep : reports) {
    if (!rep.ok()) return kExitValidation;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coordinated multi-BS precoder design under per-antenna power constraints"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Run the alternating design on one channel draw");
  solve->add_option("config", solve_args.config, "Run configuration (JSON)")->required();
  solve->add_option("--seed", solve_args.seed, "Channel seed (overrides experiment.seed)");
  solve->add_option("--channels-file", solve_args.channels_file,
                    "Fixed channels as {\"channels\": [[[re, im], ...], ...]}");
  solve->add_option("--out", solve_args.out, "Output path");
  solve->add_option("--format", solve_args.format, "json (result) or csv (power profile)")
      ->check(CLI::IsMember({"json", "csv"}));
  solve->add_flag("--recheck", solve_args.recheck,
                  "Re-evaluate the written result from its stored precoders");

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo SNR sweep over strategies");
  sweep->add_option("config", sweep_args.config, "Run configuration (JSON)")->required();
  sweep->add_option("--seed", sweep_args.seed, "Master seed (overrides experiment.seed)");
  sweep->add_option("--realizations", sweep_args.realizations, "Channel draws per SNR point")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--strategy", sweep_args.strategies,
                    "algorithm_I, weighted_mse, zf or mrt; repeatable");
  sweep->add_option("--out", sweep_args.out, "Output path");
  sweep->add_option("--format", sweep_args.format, "csv or json")
      ->check(CLI::IsMember({"json", "csv"}));

  ValidateArgs validate_args;
  auto* validate = app.add_subcommand("validate", "Run oracle cross-check suites");
  validate->add_option("--suite", validate_args.suite, "aux, subproblem, endtoend or all")
      ->check(CLI::IsMember({"aux", "subproblem", "endtoend", "all"}));
  validate->add_option("--seed", validate_args.seed, "Suite seed");
  validate->add_option("--out", validate_args.out, "Write the JSON report here instead of stdout");

  std::string recheck_path;
  auto* recheck = app.add_subcommand("recheck", "Re-validate a stored result file");
  recheck->add_option("result", recheck_path, "Result JSON written by solve")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (*solve) return cmd_solve(solve_args);
    if (*sweep) return cmd_sweep(sweep_args);
    if (*validate) return cmd_validate(validate_args);
    if (*recheck) return cmd_recheck_file(recheck_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return kExitError;
}
