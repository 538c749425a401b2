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

// Precoder update for fixed auxiliary variables (nu, tau, eta).
//
// After rotating every b_k so that c_k = h_k^H b_k is real, the problem
//
//   min  sum_k nu_k [ tau_k/(2 c_k^4) + (f_k^4/(2 eta_k) + (eta_k/2) r_k^4)/(2 tau_k) + x_k ]
//   s.t. (t_k - 1)^2 <= x_k,  t_k^2 <= f_k,
//        sum_{i != k} |h_k^H b_i|^2 + sigma_k^2 <= r_k,
//        h_k^H b_k = c_k,  c_k >= floor,
//        sum_{n in G} sum_k |b_{k,n}|^2 <= P_G  for every power group G
//
// is convex. The epigraph variables are tight at the optimum, so the solver
// works on the eliminated smooth form over (Re b, Im b, t) with a
// log-barrier Newton method.

#include <optional>
#include <stdexcept>

#include "coordbeam/aux_updates.hpp"
#include "coordbeam/model.hpp"

namespace coordbeam {

/// No precoder can reach c_k >= floor for some user under the budgets.
class InfeasibleFloor : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConstraintCounts {
  int power = 0;
  /// x, f, r epigraph rows and the c >= floor row, per user.
  int per_user_inequalities = 0;
  /// One complex equality h_k^H b_k = c_k per user.
  int equalities = 0;
};

struct SubproblemSpec {
  SystemConfig config;
  ChannelSet channels;
  RVector nu;
  RVector tau;
  RVector eta;
  double floor = kDefaultFloor;
  double tolerance = 1e-8;
  int max_iterations = 200;

  ConstraintCounts counts() const;
  void validate() const;
};

struct SubproblemDiagnostics {
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  double kkt_residual = 0.0;
  double objective = 0.0;
  /// KKT tolerance reached.
  bool exact = false;
  /// The solver result was worse than the warm start, which was returned.
  bool kept_warm_start = false;
};

struct SubproblemSolution {
  PrecoderSet precoders;
  RVector t;
  /// Epigraph values at the returned point.
  RVector x;
  RVector f;
  RVector r;
  RVector c;
  SubproblemDiagnostics diagnostics;
};

SubproblemSpec build_subproblem(const SystemConfig& config, const ChannelSet& channels,
                                const AuxState& aux, double floor = kDefaultFloor,
                                double tolerance = 1e-8);

/// Subproblem objective at (precoders, t) with tight epigraph variables and
/// c_k = |h_k^H b_k|.
double subproblem_objective(const SubproblemSpec& spec, const PrecoderSet& precoders,
                            const RVector& t);

/// Largest c_k reachable by user k alone under the power budgets.
RVector max_effective_gain(const SystemConfig& config, const ChannelSet& channels);

/// Throws InfeasibleFloor when some user cannot reach the floor, and
/// InvalidInput for malformed specs.
SubproblemSolution solve_subproblem(const SubproblemSpec& spec,
                                    const std::optional<SubproblemSolution>& warm_start = {});

/// Raises any c_k below the floor to the floor.
SubproblemSolution apply_floors(SubproblemSolution solution, double floor = kDefaultFloor);

}  // namespace coordbeam
