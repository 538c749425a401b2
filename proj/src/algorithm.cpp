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

#include "coordbeam/algorithm.hpp"

#include <cmath>
#include <limits>

namespace coordbeam {

void SolveOptions::validate() const {
  if (max_outer_iters < 1) throw InvalidInput("max_outer_iters must be at least 1");
  if (!(rel_obj_tol > 0.0)) throw InvalidInput("rel_obj_tol must be positive");
  if (!(floor > 0.0)) throw InvalidInput("floor must be positive");
  if (!(subproblem_tol > 0.0)) throw InvalidInput("subproblem_tol must be positive");
  if (subproblem_max_iters < 1) throw InvalidInput("subproblem_max_iters must be at least 1");
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged:
      return "converged";
    case SolveStatus::kIterCap:
      return "iter_cap";
    case SolveStatus::kSubproblemInexact:
      return "subproblem_inexact";
  }
  return "unknown";
}

std::string to_string(ObjectiveKind kind) {
  return kind == ObjectiveKind::kSumRate ? "sum_rate" : "weighted_mse";
}

PrecoderSet matched_filter_per_group(const SystemConfig& config, const ChannelSet& channels) {
  PrecoderSet b{channels.h};
  for (const auto& g : config.constraint_groups()) {
    double load = 0.0;
    for (int n : g.antennas) {
      for (const auto& h : channels.h) load += std::norm(h(n));
    }
    const double scale = (g.budget > 0.0 && load > 0.0) ? std::sqrt(g.budget / load) : 0.0;
    for (int n : g.antennas) {
      for (auto& bk : b.b) bk(n) *= scale;
    }
  }
  return b;
}

Initialization initialize(const SystemConfig& config, const ChannelSet& channels, InitMode mode) {
  config.validate();
  check_dimensions(config, channels);
  PrecoderSet b;
  if (mode == InitMode::kPerAntenna) {
    b = matched_filter_per_group(config, channels);
  } else {
    b = PrecoderSet{channels.h};
    double alpha = std::numeric_limits<double>::infinity();
    for (const auto& g : config.constraint_groups()) {
      double load = 0.0;
      for (int n : g.antennas) {
        for (const auto& h : channels.h) load += std::norm(h(n));
      }
      if (g.budget <= 0.0) {
        for (int n : g.antennas) {
          for (auto& bk : b.b) bk(n) = 0.0;
        }
      } else if (load > 0.0) {
        alpha = std::min(alpha, std::sqrt(g.budget / load));
      }
    }
    if (!std::isfinite(alpha)) alpha = 0.0;
    for (auto& bk : b.b) bk *= alpha;
  }
  if (per_antenna_power(b).sum() <= 0.0) {
    throw InvalidInput("initialize: channels are zero on every powered antenna");
  }
  Initialization init;
  init.precoders = phase_rotate(channels, b);
  init.t = update_t_z(sinr(config, channels, init.precoders)).t;
  return init;
}

std::vector<int> switched_off_users(const ChannelSet& channels, const PrecoderSet& precoders,
                                    double floor) {
  std::vector<int> off;
  for (int k = 0; k < precoders.num_users(); ++k) {
    const double c = std::abs(channels.h[static_cast<size_t>(k)].dot(
        precoders.b[static_cast<size_t>(k)]));
    if (c <= kSwitchedOffFactor * floor) off.push_back(k);
  }
  return off;
}

SolveResult run(const SystemConfig& config, const ChannelSet& channels,
                const SolveOptions& options) {
  options.validate();
  const NuPolicy policy =
      options.objective == ObjectiveKind::kSumRate ? NuPolicy::kOptimize : NuPolicy::kFixedWeights;
  const Initialization init = initialize(config, channels, options.init);

  SolveResult result;
  PrecoderSet b = init.precoders;
  RVector t = init.t;
  AuxState aux;
  double prev_objective = std::numeric_limits<double>::quiet_NaN();

  for (int iter = 1; iter <= options.max_outer_iters; ++iter) {
    // Auxiliary block: t refreshed from the SINRs, then tau, eta, nu. The
    // carried-over t competes because the floors can make the refresh
    // non-optimal.
    AuxState refreshed = optimal_aux(config, channels, b, policy, options.floor);
    AuxState carried = optimal_aux_fixed_t(config, channels, b, t, policy, options.floor);
    const double obj_refreshed = objective_21(config, channels, b, refreshed);
    const double obj_carried = objective_21(config, channels, b, carried);
    aux = obj_refreshed <= obj_carried ? std::move(refreshed) : std::move(carried);
    const double objective_after_aux = std::min(obj_refreshed, obj_carried);

    // Precoder block.
    SubproblemSpec spec = build_subproblem(config, channels, aux, options.floor,
                                           options.subproblem_tol);
    spec.max_iterations = options.subproblem_max_iters;
    SubproblemSolution warm;
    warm.precoders = b;
    warm.t = aux.t;
    SubproblemSolution sol = apply_floors(solve_subproblem(spec, warm), options.floor);
    b = sol.precoders;
    t = sol.t;
    aux.t = t;
    aux.z = 1.0 - t.array();

    IterationRecord rec;
    rec.iteration = iter;
    rec.objective_after_aux = objective_after_aux;
    rec.objective = objective_21(config, channels, b, aux);
    rec.sum_rate = sum_rate(config, channels, b);
    rec.weighted_mse = weighted_mse_objective(config, channels, b);
    rec.max_power_violation = check_feasible(config, b, 0.0).max_violation;
    rec.subproblem_iterations = sol.diagnostics.iterations;
    rec.subproblem_kkt = sol.diagnostics.kkt_residual;
    result.trace.push_back(rec);
    result.iterations = iter;

    if (!sol.diagnostics.exact && !sol.diagnostics.kept_warm_start) {
      result.status = SolveStatus::kSubproblemInexact;
      break;
    }
    if (iter >= 2 && prev_objective - rec.objective <= options.rel_obj_tol * prev_objective) {
      result.status = SolveStatus::kConverged;
      break;
    }
    prev_objective = rec.objective;
  }

  result.precoders = b;
  result.aux = aux;
  result.metrics = link_metrics(config, channels, b);
  result.sum_rate = result.metrics.rate.sum();
  result.weighted_mse = config.weights().dot(result.metrics.mmse);
  result.antenna_power = per_antenna_power(b);
  result.switched_off = switched_off_users(channels, b, options.floor);
  return result;
}

SolveResult run_weighted_mse(const SystemConfig& config, const ChannelSet& channels,
                             const RVector& weights, SolveOptions options) {
  SystemConfig weighted = config;
  weighted.mse_weights = weights;
  weighted.validate();
  options.objective = ObjectiveKind::kWeightedMse;
  return run(weighted, channels, options);
}

}  // namespace coordbeam
