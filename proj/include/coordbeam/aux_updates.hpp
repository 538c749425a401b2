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

// Closed-form updates of the auxiliary variables of the reformulated
// sum-rate problem, for fixed precoders.
//
// Per user k the relaxed objective is
//
//   nu_k [ (t_k - 1)^2 + tau_k / (2 c_k^4)
//          + (1 / (2 tau_k)) (f_k^4 / (2 eta_k) + (eta_k / 2) r_k^4) ]
//
// with c_k = |h_k^H b_k|, f_k = t_k^2, r_k = interference + noise and
// prod_k nu_k = 1. Minimizing over (t, tau, eta) gives (1 + psi_k)^-1 per
// user; minimizing over nu then gives K (prod_k beta_k)^(1/K).

#include "coordbeam/model.hpp"

namespace coordbeam {

inline constexpr double kDefaultFloor = 1e-6;
/// Lower clamp on beta before the nu update.
inline constexpr double kBetaFloor = 1e-12;

struct AuxState {
  RVector nu;
  RVector t;
  RVector z;
  RVector tau;
  RVector eta;

  int num_users() const { return static_cast<int>(nu.size()); }
};

/// nu_k = (prod_i beta_i)^(1/K) / beta_k. The geometric mean is evaluated
/// in the log domain. Throws InvalidInput if any beta_k <= 0.
RVector update_nu(const RVector& beta);

struct TZ {
  RVector t;
  RVector z;
};

/// t_k = psi_k / (1 + psi_k), z_k = 1 / (1 + psi_k).
TZ update_t_z(const RVector& psi);

struct TauEta {
  double tau = 0.0;
  double eta = 0.0;
};

/// eta = f^2 / r^2 and tau = c^2 f r: the unique minimizers of
/// f^4/(2 eta) + (eta/2) r^4 and tau/(2 c^4) + f^2 r^2 / (2 tau).
/// Throws InvalidInput unless c, f, r > 0.
TauEta update_tau_eta(double c, double f, double r);

/// Minimizers of the same two scalar problems restricted to
/// tau, eta >= floor. Accepts f == 0.
TauEta update_tau_eta_floored(double c, double f, double r, double floor);

/// The bracketed per-user term of the relaxed objective (without nu).
double aux_user_term(double t, double tau, double eta, double c, double r);

/// Relaxed objective sum_k nu_k * aux_user_term(...). c_k = |h_k^H b_k|,
/// which must be positive for every user.
double objective_21(const SystemConfig& config, const ChannelSet& channels,
                    const PrecoderSet& precoders, const AuxState& aux);

/// Interference plus noise per user, sum_{i != k} |h_k^H b_i|^2 + sigma_k^2.
RVector interference_plus_noise(const SystemConfig& config, const ChannelSet& channels,
                                const PrecoderSet& precoders);

enum class NuPolicy {
  /// Optimize nu subject to prod nu = 1 (sum-rate objective).
  kOptimize,
  /// Hold nu at the MSE weights (weighted sum-MSE objective).
  kFixedWeights,
};

/// Joint minimizer of the relaxed objective over (t, z, tau, eta, nu) for
/// fixed precoders. With floor == 0 this is the exact closed form; with a
/// positive floor, tau, eta and c are clamped from below first.
AuxState optimal_aux(const SystemConfig& config, const ChannelSet& channels,
                     const PrecoderSet& precoders, NuPolicy policy, double floor);

/// Minimizer over (tau, eta, nu) with t held at `t`, floors applied.
AuxState optimal_aux_fixed_t(const SystemConfig& config, const ChannelSet& channels,
                             const PrecoderSet& precoders, const RVector& t, NuPolicy policy,
                             double floor);

/// Clamps tau and eta from below.
AuxState apply_floors(AuxState aux, double floor = kDefaultFloor);

struct GpNuResult {
  RVector nu;
  bool converged = false;
  int iterations = 0;
};

/// Numeric solution of min ((1/K) sum beta_k nu_k)^K s.t. prod nu = 1 by
/// damped Newton on the reduced log-domain problem (nu_1 eliminated).
/// Used to cross-check update_nu.
GpNuResult gp_oracle_nu(const RVector& beta, int max_iters = 200, double tol = 1e-14);

}  // namespace coordbeam
