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

// Slow, independent reference computations used to cross-check the closed
// forms and the convex solver. Nothing here is on the production path.

#include <cstdint>
#include <functional>

#include "coordbeam/model.hpp"
#include "coordbeam/precoder_step.hpp"

namespace coordbeam::oracle {

/// Minimizer of a unimodal f on [lo, hi] by golden-section search in
/// extended precision.
long double golden_section(const std::function<long double(long double)>& f, long double lo,
                           long double hi, int iterations = 200);

struct TauEtaOracle {
  double tau = 0.0;
  double eta = 0.0;
};

/// eta minimizes f^4/(2 eta) + (eta/2) r^4, then tau minimizes
/// tau/(2 c^4) + G/(2 tau) at that eta. Both searches run over log(x).
TauEtaOracle tau_eta(double c, double f, double r);

/// Minimizer of ((1/K) sum beta_k nu_k)^K over prod nu = 1 by projected
/// gradient descent in log(nu) (projection removes the mean).
RVector nu_projected_descent(const RVector& beta, int iterations = 20000);

/// K = 2 only: best nu on a log-spaced grid of nu_1 with nu_2 = 1/nu_1,
/// refined around the best cell.
RVector nu_grid_k2(const RVector& beta);

/// SINR by explicit scalar loops.
RVector sinr_scalar_loop(const SystemConfig& config, const ChannelSet& channels,
                         const PrecoderSet& precoders);

/// Diagonal of sum_k b_k b_k^H formed as outer products.
RVector antenna_power_outer_product(const PrecoderSet& precoders);

struct PgSubproblemResult {
  PrecoderSet precoders;
  RVector t;
  double objective = 0.0;
};

/// Minimizes the precoder subproblem objective with c_k = |h_k^H b_k| by
/// projected gradient descent from `restarts` random feasible starts.
/// Gradients are written directly in the complex variables.
PgSubproblemResult subproblem_projected_gradient(const SubproblemSpec& spec, int restarts,
                                                 std::uint64_t seed,
                                                 int iterations_per_start = 4000);

/// The subproblem objective evaluated term by term from its definition.
double subproblem_objective_direct(const SubproblemSpec& spec, const PrecoderSet& precoders,
                                   const RVector& t);

/// A random precoder set on the budget boundary of every power group.
PrecoderSet random_feasible_precoders(const SystemConfig& config, std::uint64_t seed);

}  // namespace coordbeam::oracle
