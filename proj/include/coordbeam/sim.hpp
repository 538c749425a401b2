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

// Monte Carlo harness: seeded channels, linear baselines, a brute-force
// sum-rate search for small instances, and SNR sweeps.

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coordbeam/algorithm.hpp"
#include "coordbeam/model.hpp"

namespace coordbeam {

/// Channel entries are (g1 + j g2)/sqrt(2) with g1, g2 standard normals
/// drawn by Box-Muller from 53-bit uniforms of std::mt19937_64.
inline constexpr std::string_view kChannelGenerator = "mt19937_64/box-muller";

ChannelSet gen_channels(std::uint64_t seed, const SystemConfig& config);

/// Seed of realization `index` under `master_seed`; independent of
/// scheduling.
std::uint64_t realization_seed(std::uint64_t master_seed, std::uint64_t index);

/// Raised by zf_baseline for K > N or a rank-deficient channel matrix.
class RankDeficient : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// b_k proportional to h_k with every power group exactly at budget.
PrecoderSet mrt_baseline(const SystemConfig& config, const ChannelSet& channels);

/// Pseudo-inverse directions with unit norm per user and one common scale
/// making the binding group tight.
PrecoderSet zf_baseline(const SystemConfig& config, const ChannelSet& channels);

struct OracleSearchResult {
  PrecoderSet precoders;
  double sum_rate = 0.0;
};

/// Best sum rate over `restarts` projected-gradient ascents from random
/// feasible starts. Deterministic given `seed`. Meant for N*K <= 8.
OracleSearchResult oracle_search(const SystemConfig& config, const ChannelSet& channels,
                                 int restarts, std::uint64_t seed);

/// Euclidean projection onto the power budgets (each group scaled back
/// onto its ball).
PrecoderSet project_onto_budgets(const SystemConfig& config, PrecoderSet precoders);

enum class Strategy { kAlgorithmI, kWeightedMse, kZf, kMrt };

std::string to_string(Strategy s);
/// Throws InvalidInput for unknown names.
Strategy parse_strategy(std::string_view name);

enum class SweepMode { kFixPowerVaryNoise };

struct ExperimentSpec {
  /// noise_var is overwritten per SNR point.
  SystemConfig config;
  int num_realizations = 100;
  std::uint64_t seed = 1;
  std::vector<double> snr_grid_db;
  SweepMode sweep_mode = SweepMode::kFixPowerVaryNoise;
  std::vector<Strategy> strategies;
  SolveOptions solve_options;
  /// Iteration-capped runs enter the mean at their last iterate; when false
  /// they are excluded. Either way they are counted.
  bool include_capped_runs = true;
  /// Worker threads; <= 0 means one.
  int threads = 1;

  void validate() const;
};

struct SweepRow {
  double snr_db = 0.0;
  Strategy strategy = Strategy::kMrt;
  double mean_sum_rate = 0.0;
  double std_sum_rate = 0.0;
  RVector mean_power;
  double frac_switched_off = 0.0;
  int num_scored = 0;
  int num_failed = 0;
  int num_capped = 0;
  /// Per-realization sum rates that entered the mean, in realization order.
  std::vector<double> sum_rates;
};

struct SweepTable {
  int num_antennas = 0;
  std::vector<SweepRow> rows;
};

/// sigma^2 = P_sum / 10^(snr_db / 10), with P_sum the total budget.
double noise_for_snr(const SystemConfig& config, double snr_db);

SweepTable run_sweep(const ExperimentSpec& spec);

/// Header: snr_db,strategy,mean_sum_rate,std_sum_rate,mean_power_1..N,frac_switched_off
void write_sweep_csv(std::ostream& out, const SweepTable& table);

}  // namespace coordbeam
