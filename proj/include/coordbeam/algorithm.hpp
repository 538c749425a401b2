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

// Alternating precoder design: closed-form auxiliary updates interleaved
// with convex precoder updates. Every step minimizes the relaxed objective
// over one block of variables, so its trace is non-increasing.

#include <string>
#include <utility>
#include <vector>

#include "coordbeam/aux_updates.hpp"
#include "coordbeam/model.hpp"
#include "coordbeam/precoder_step.hpp"

namespace coordbeam {

enum class ObjectiveKind { kSumRate, kWeightedMse };

enum class InitMode {
  /// Rescale every antenna (group) of the stacked matched filter so it is
  /// exactly at budget.
  kPerAntenna,
  /// One positive scale for all users; only the binding constraint is tight.
  kGlobalScale,
};

struct SolveOptions {
  int max_outer_iters = 100;
  double rel_obj_tol = 1e-6;
  double floor = kDefaultFloor;
  ObjectiveKind objective = ObjectiveKind::kSumRate;
  double subproblem_tol = 1e-8;
  int subproblem_max_iters = 200;
  InitMode init = InitMode::kPerAntenna;

  void validate() const;
};

enum class SolveStatus { kConverged, kIterCap, kSubproblemInexact };

std::string to_string(SolveStatus status);
std::string to_string(ObjectiveKind kind);

struct IterationRecord {
  int iteration = 0;
  /// Relaxed objective after the auxiliary update.
  double objective_after_aux = 0.0;
  /// Relaxed objective after the precoder update; the monotone trace.
  double objective = 0.0;
  double sum_rate = 0.0;
  double weighted_mse = 0.0;
  double max_power_violation = 0.0;
  int subproblem_iterations = 0;
  double subproblem_kkt = 0.0;
};

struct SolveResult {
  PrecoderSet precoders;
  AuxState aux;
  LinkMetrics metrics;
  double sum_rate = 0.0;
  double weighted_mse = 0.0;
  RVector antenna_power;
  /// Users whose effective gain sits at the floor.
  std::vector<int> switched_off;
  std::vector<IterationRecord> trace;
  SolveStatus status = SolveStatus::kIterCap;
  int iterations = 0;
};

struct Initialization {
  PrecoderSet precoders;
  RVector t;
};

/// b_k proportional to h_k, scaled to the budgets, phase rotated, with t
/// from the resulting SINRs. Throws InvalidInput if every channel is zero
/// on the powered antennas.
Initialization initialize(const SystemConfig& config, const ChannelSet& channels,
                          InitMode mode = InitMode::kPerAntenna);

/// Stacked matched filter rescaled so each power group is exactly at budget.
PrecoderSet matched_filter_per_group(const SystemConfig& config, const ChannelSet& channels);

/// Sum-rate or weighted-MSE design, selected by options.objective.
SolveResult run(const SystemConfig& config, const ChannelSet& channels,
                const SolveOptions& options = {});

/// Weighted sum-MSE design with nu held at `weights`.
SolveResult run_weighted_mse(const SystemConfig& config, const ChannelSet& channels,
                             const RVector& weights, SolveOptions options = {});

/// Effective gains at or below this multiple of the floor count as switched off.
inline constexpr double kSwitchedOffFactor = 1.001;

std::vector<int> switched_off_users(const ChannelSet& channels, const PrecoderSet& precoders,
                                    double floor);

}  // namespace coordbeam
