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

#pragma once

// JSON run configurations and result files, CSV power profiles. Parsing
// and formatting only; all numerics live in the core library.

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "coordbeam/algorithm.hpp"
#include "coordbeam/model.hpp"
#include "coordbeam/sim.hpp"
#include "coordbeam/validation.hpp"

namespace coordbeam::io {

/// Malformed or schema-violating input. The message names the source, and
/// either the line and column of a syntax error or the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentSection {
  std::uint64_t seed = 1;
  int realizations = 100;
  std::vector<double> snr_grid_db;
  std::vector<Strategy> strategies;
};

struct OutputSection {
  std::string path;
  /// "json" or "csv"; empty when the config leaves it to the command.
  std::string format;
};

struct RunConfig {
  SystemConfig system;
  SolveOptions solver;
  ExperimentSection experiment;
  OutputSection output;
};

/// Parses a RunConfig document. `source` only labels diagnostics.
RunConfig parse_run_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_run_config(const std::string& path);

/// Reads {"channels": [[[re, im], ...], ...]} (a result file also works)
/// and checks it against `config`.
ChannelSet load_channels(const std::string& path, const SystemConfig& config);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

struct ResultContext {
  std::uint64_t seed = 0;
  /// Where the channels came from: "generated" or a file path.
  std::string channel_source;
};

/// Result document: system echo, channels, precoders as [re, im] pairs,
/// per-user metrics, antenna powers, trace and status.
std::string result_json(const SystemConfig& config, const ChannelSet& channels,
                        const SolveOptions& options, const SolveResult& result,
                        const ResultContext& context);

/// antenna,bs,power,budget,utilization; one row per antenna.
void write_power_profile_csv(std::ostream& out, const SystemConfig& config,
                             const RVector& antenna_power);

std::string sweep_json(const SweepTable& table, const ExperimentSpec& spec);

std::string validation_json(const std::vector<validation::SuiteReport>& reports);

struct RecheckReport {
  bool ok = true;
  double max_error = 0.0;
  /// First mismatching field, if any.
  std::string field;
};

/// Recomputes SINR, rates, MMSE, antenna powers and the sum rate from the
/// stored system, channels and precoders of a result document and compares
/// them with the stored values (relative tolerance, floored at 1).
RecheckReport recheck_result(const std::string& text, double tolerance = 1e-9);

}  // namespace coordbeam::io
