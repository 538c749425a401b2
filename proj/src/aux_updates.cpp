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

#include "coordbeam/aux_updates.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace coordbeam {

RVector update_nu(const RVector& beta) {
  if (beta.size() == 0) throw InvalidInput("update_nu: empty beta");
  if (!beta.allFinite() || (beta.array() <= 0.0).any()) {
    throw InvalidInput("update_nu: beta entries must be finite and positive");
  }
  const RVector log_beta = beta.array().log();
  const double log_geo_mean = log_beta.mean();
  return (log_geo_mean - log_beta.array()).exp();
}

TZ update_t_z(const RVector& psi) {
  if ((psi.array() < 0.0).any()) throw InvalidInput("update_t_z: psi must be nonnegative");
  TZ out;
  out.z = (1.0 + psi.array()).inverse();
  out.t = psi.array() * out.z.array();
  return out;
}

TauEta update_tau_eta(double c, double f, double r) {
  if (!(c > 0.0) || !(f > 0.0) || !(r > 0.0)) {
    throw InvalidInput("update_tau_eta: c, f, r must be positive");
  }
  return {c * c * f * r, (f / r) * (f / r)};
}

TauEta update_tau_eta_floored(double c, double f, double r, double floor) {
  if (!(c > 0.0) || !(r > 0.0) || f < 0.0) {
    throw InvalidInput("update_tau_eta_floored: need c, r > 0 and f >= 0");
  }
  TauEta out;
  out.eta = std::max(floor, (f / r) * (f / r));
  if (out.eta <= 0.0) throw InvalidInput("update_tau_eta_floored: zero eta needs a positive floor");
  // tau/(2c^4) + g/(2 tau) with g = f^4/(2 eta) + (eta/2) r^4 is minimized at c^2 sqrt(g).
  const double r2 = r * r;
  const double f2 = f * f;
  const double g = f2 * f2 / (2.0 * out.eta) + 0.5 * out.eta * r2 * r2;
  out.tau = std::max(floor, c * c * std::sqrt(g));
  return out;
}

double aux_user_term(double t, double tau, double eta, double c, double r) {
  const double f = t * t;
  const double f2 = f * f;
  const double c2 = c * c;
  const double r2 = r * r;
  return (t - 1.0) * (t - 1.0) + tau / (2.0 * c2 * c2) +
         (f2 * f2 / (2.0 * eta) + 0.5 * eta * r2 * r2) / (2.0 * tau);
}

RVector interference_plus_noise(const SystemConfig& config, const ChannelSet& channels,
                                const PrecoderSet& precoders) {
  check_dimensions(config, channels, precoders);
  const Eigen::MatrixXd gains = gain_matrix(channels, precoders);
  RVector r(config.num_users);
  for (int k = 0; k < config.num_users; ++k) {
    r(k) = std::max(gains.row(k).sum() - gains(k, k), 0.0) + config.noise_var(k);
  }
  return r;
}

double objective_21(const SystemConfig& config, const ChannelSet& channels,
                    const PrecoderSet& precoders, const AuxState& aux) {
  check_dimensions(config, channels, precoders);
  const int k_users = config.num_users;
  if (aux.nu.size() != k_users || aux.t.size() != k_users || aux.tau.size() != k_users ||
      aux.eta.size() != k_users) {
    throw InvalidInput("objective_21: aux state has wrong length");
  }
  const RVector r = interference_plus_noise(config, channels, precoders);
  double total = 0.0;
  for (int k = 0; k < k_users; ++k) {
    const double c = std::abs(channels.h[static_cast<size_t>(k)].dot(
        precoders.b[static_cast<size_t>(k)]));
    if (!(c > 0.0)) throw InvalidInput("objective_21: zero effective channel gain");
    if (!(aux.tau(k) > 0.0) || !(aux.eta(k) > 0.0)) {
      throw InvalidInput("objective_21: tau and eta must be positive");
    }
    total += aux.nu(k) * aux_user_term(aux.t(k), aux.tau(k), aux.eta(k), c, r(k));
  }
  return total;
}

AuxState optimal_aux_fixed_t(const SystemConfig& config, const ChannelSet& channels,
                             const PrecoderSet& precoders, const RVector& t, NuPolicy policy,
                             double floor) {
  const int k_users = config.num_users;
  if (t.size() != k_users) throw InvalidInput("optimal_aux_fixed_t: t has wrong length");
  const RVector r = interference_plus_noise(config, channels, precoders);
  AuxState aux;
  aux.t = t;
  aux.z = 1.0 - t.array();
  aux.tau.resize(k_users);
  aux.eta.resize(k_users);
  RVector terms(k_users);
  for (int k = 0; k < k_users; ++k) {
    double c = std::abs(channels.h[static_cast<size_t>(k)].dot(
        precoders.b[static_cast<size_t>(k)]));
    c = std::max(c, floor);
    const double f = t(k) * t(k);
    const TauEta te = floor > 0.0 ? update_tau_eta_floored(c, f, r(k), floor)
                                  : update_tau_eta(c, f, r(k));
    aux.tau(k) = te.tau;
    aux.eta(k) = te.eta;
    terms(k) = aux_user_term(t(k), te.tau, te.eta, c, r(k));
  }
  if (policy == NuPolicy::kOptimize) {
    aux.nu = update_nu(terms.cwiseMax(kBetaFloor));
  } else {
    aux.nu = config.weights();
  }
  return aux;
}

AuxState optimal_aux(const SystemConfig& config, const ChannelSet& channels,
                     const PrecoderSet& precoders, NuPolicy policy, double floor) {
  const TZ tz = update_t_z(sinr(config, channels, precoders));
  return optimal_aux_fixed_t(config, channels, precoders, tz.t, policy, floor);
}

AuxState apply_floors(AuxState aux, double floor) {
  aux.tau = aux.tau.cwiseMax(floor);
  aux.eta = aux.eta.cwiseMax(floor);
  return aux;
}

GpNuResult gp_oracle_nu(const RVector& beta, int max_iters, double tol) {
  const int k_users = static_cast<int>(beta.size());
  if (k_users == 0 || (beta.array() <= 0.0).any()) {
    throw InvalidInput("gp_oracle_nu: beta entries must be positive");
  }
  GpNuResult result;
  if (k_users == 1) {
    result.nu = RVector::Ones(1);
    result.converged = true;
    return result;
  }
  // Reduced variables y_j = log nu_{j+1}, j = 0..K-2; log nu_0 = -sum(y).
  // Minimize phi(y) = sum_k beta_k nu_k, which has the same minimizer as the
  // K-th power of the mean.
  const int m = k_users - 1;
  RVector y = RVector::Zero(m);
  auto phi = [&](const RVector& yy) {
    double v = beta(0) * std::exp(-yy.sum());
    for (int j = 0; j < m; ++j) v += beta(j + 1) * std::exp(yy(j));
    return v;
  };
  for (int it = 0; it < max_iters; ++it) {
    result.iterations = it + 1;
    const double e0 = beta(0) * std::exp(-y.sum());
    RVector grad(m);
    Eigen::MatrixXd hess = Eigen::MatrixXd::Constant(m, m, e0);
    for (int j = 0; j < m; ++j) {
      const double ej = beta(j + 1) * std::exp(y(j));
      grad(j) = ej - e0;
      hess(j, j) += ej;
    }
    const RVector step = -hess.ldlt().solve(grad);
    const double decrement2 = -grad.dot(step);
    if (decrement2 / 2.0 <= tol * phi(y)) {
      // Inside the quadratic region: one more full step squares the error.
      y += step;
      result.converged = true;
      break;
    }
    double s = 1.0;
    const double phi0 = phi(y);
    while (phi(y + s * step) > phi0 - 0.25 * s * decrement2 && s > 1e-12) s *= 0.5;
    y += s * step;
  }
  result.nu.resize(k_users);
  result.nu(0) = std::exp(-y.sum());
  for (int j = 0; j < m; ++j) result.nu(j + 1) = std::exp(y(j));
  return result;
}

}  // namespace coordbeam
