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

#include "coordbeam/precoder_step.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "interior_point.hpp"
#include "subproblem_model.hpp"

namespace coordbeam {

namespace detail {

SubproblemModel::SubproblemModel(const SubproblemSpec& spec)
    : spec_(spec),
      num_users_(spec.config.num_users),
      num_antennas_(spec.config.num_antennas()),
      active_(spec.config.active_antennas()) {
  num_active_ = static_cast<int>(active_.size());
  a_re_.resize(num_users_, 2 * num_active_);
  a_im_.resize(num_users_, 2 * num_active_);
  for (int k = 0; k < num_users_; ++k) {
    const CVector& h = spec.channels.h[static_cast<size_t>(k)];
    for (int j = 0; j < num_active_; ++j) {
      const Complex hn = h(active_[static_cast<size_t>(j)]);
      // h^H b = sum conj(h_n)(u_n + i v_n)
      a_re_(k, j) = hn.real();
      a_re_(k, num_active_ + j) = hn.imag();
      a_im_(k, j) = -hn.imag();
      a_im_(k, num_active_ + j) = hn.real();
    }
  }
}

double SubproblemModel::effective_gain(const Eigen::VectorXd& x, int k) const {
  return a_re_.row(k).dot(x.segment(block(k), 2 * num_active_));
}

double SubproblemModel::effective_gain_imag(const Eigen::VectorXd& x, int k) const {
  return a_im_.row(k).dot(x.segment(block(k), 2 * num_active_));
}

double SubproblemModel::interference(const Eigen::VectorXd& x, int k) const {
  double r = spec_.config.noise_var(k);
  for (int i = 0; i < num_users_; ++i) {
    if (i == k) continue;
    const auto xi = x.segment(block(i), 2 * num_active_);
    const double re = a_re_.row(k).dot(xi);
    const double im = a_im_.row(k).dot(xi);
    r += re * re + im * im;
  }
  return r;
}

double SubproblemModel::value(const Eigen::VectorXd& x) const {
  double total = 0.0;
  for (int k = 0; k < num_users_; ++k) {
    const double t = x(t_index(k));
    const double c = effective_gain(x, k);
    const double r = interference(x, k);
    total += spec_.nu(k) * aux_user_term(t, spec_.tau(k), spec_.eta(k), c, r);
  }
  return total;
}

void SubproblemModel::derivatives(const Eigen::VectorXd& x, Eigen::VectorXd& grad,
                                  Eigen::MatrixXd& hess) const {
  const int n = dim();
  const int bw = 2 * num_active_;
  grad.setZero(n);
  hess.setZero(n, n);
  Eigen::VectorXd grad_r(n);
  for (int k = 0; k < num_users_; ++k) {
    const double nu = spec_.nu(k);
    const double tau = spec_.tau(k);
    const double eta = spec_.eta(k);

    const int ti = t_index(k);
    const double t = x(ti);
    const double t2 = t * t;
    const double t6 = t2 * t2 * t2;
    grad(ti) += nu * (2.0 * (t - 1.0) + 2.0 * t6 * t / (tau * eta));
    hess(ti, ti) += nu * (2.0 + 14.0 * t6 / (tau * eta));

    const double c = effective_gain(x, k);
    const double c2 = c * c;
    const double c4 = c2 * c2;
    const Eigen::VectorXd a = a_re_.row(k).transpose();
    grad.segment(block(k), bw) += (-2.0 * nu * tau / (c4 * c)) * a;
    hess.block(block(k), block(k), bw, bw) += (10.0 * nu * tau / (c4 * c2)) * a * a.transpose();

    if (num_users_ == 1) continue;
    const double w = nu * eta / (4.0 * tau);
    const double r = interference(x, k);
    grad_r.setZero();
    const Eigen::VectorXd ar = a_re_.row(k).transpose();
    const Eigen::VectorXd ai = a_im_.row(k).transpose();
    const Eigen::MatrixXd q2 = 2.0 * (ar * ar.transpose() + ai * ai.transpose());
    for (int i = 0; i < num_users_; ++i) {
      if (i == k) continue;
      const auto xi = x.segment(block(i), bw);
      grad_r.segment(block(i), bw) = 2.0 * (ar.dot(xi) * ar + ai.dot(xi) * ai);
    }
    const double r2 = r * r;
    grad += (4.0 * w * r2 * r) * grad_r;
    hess.noalias() += (12.0 * w * r2) * grad_r * grad_r.transpose();
    for (int i = 0; i < num_users_; ++i) {
      if (i == k) continue;
      hess.block(block(i), block(i), bw, bw) += (4.0 * w * r2 * r) * q2;
    }
  }
}

Eigen::VectorXd SubproblemModel::pack(const PrecoderSet& precoders, const RVector& t) const {
  Eigen::VectorXd x(dim());
  for (int k = 0; k < num_users_; ++k) {
    const CVector& b = precoders.b[static_cast<size_t>(k)];
    for (int j = 0; j < num_active_; ++j) {
      const Complex v = b(active_[static_cast<size_t>(j)]);
      x(block(k) + j) = v.real();
      x(block(k) + num_active_ + j) = v.imag();
    }
    x(t_index(k)) = t(k);
  }
  return x;
}

PrecoderSet SubproblemModel::unpack_precoders(const Eigen::VectorXd& x) const {
  PrecoderSet out = PrecoderSet::zeros(num_users_, num_antennas_);
  for (int k = 0; k < num_users_; ++k) {
    for (int j = 0; j < num_active_; ++j) {
      out.b[static_cast<size_t>(k)](active_[static_cast<size_t>(j)]) =
          Complex(x(block(k) + j), x(block(k) + num_active_ + j));
    }
  }
  return out;
}

RVector SubproblemModel::unpack_t(const Eigen::VectorXd& x) const {
  return x.tail(num_users_);
}

std::vector<DiagQuadraticConstraint> SubproblemModel::inequalities() const {
  std::vector<DiagQuadraticConstraint> rows;
  const int n = dim();
  std::vector<int> slot(static_cast<size_t>(num_antennas_), -1);
  for (int j = 0; j < num_active_; ++j) slot[static_cast<size_t>(active_[static_cast<size_t>(j)])] = j;
  for (const auto& g : spec_.config.constraint_groups()) {
    if (g.budget <= 0.0) continue;
    DiagQuadraticConstraint row;
    row.hess_diag = Eigen::VectorXd::Zero(n);
    row.linear = Eigen::VectorXd::Zero(n);
    row.offset = -g.budget;
    for (int ant : g.antennas) {
      const int j = slot[static_cast<size_t>(ant)];
      for (int k = 0; k < num_users_; ++k) {
        row.hess_diag(block(k) + j) = 2.0;
        row.hess_diag(block(k) + num_active_ + j) = 2.0;
      }
    }
    rows.push_back(std::move(row));
  }
  for (int k = 0; k < num_users_; ++k) {
    DiagQuadraticConstraint row;
    row.linear = Eigen::VectorXd::Zero(n);
    row.linear.segment(block(k), 2 * num_active_) = -a_re_.row(k).transpose();
    row.offset = spec_.floor;
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd SubproblemModel::equality_matrix() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(num_users_, dim());
  for (int k = 0; k < num_users_; ++k) {
    a.block(k, block(k), 1, 2 * num_active_) = a_im_.row(k);
  }
  return a;
}

}  // namespace detail

namespace {

bool satisfies_budgets(const SystemConfig& config, const PrecoderSet& precoders) {
  return check_feasible(config, precoders, 1e-12).feasible;
}

// Each user gets an equal share of half of every group's budget along its
// own matched-filter direction. Strictly feasible for the power rows.
PrecoderSet reference_point(const SystemConfig& config, const ChannelSet& channels) {
  const int k_users = config.num_users;
  PrecoderSet ref = PrecoderSet::zeros(k_users, config.num_antennas());
  for (const auto& g : config.constraint_groups()) {
    if (g.budget <= 0.0) continue;
    const double amp = std::sqrt(g.budget / (2.0 * k_users));
    for (int k = 0; k < k_users; ++k) {
      const CVector& h = channels.h[static_cast<size_t>(k)];
      double norm2 = 0.0;
      for (int n : g.antennas) norm2 += std::norm(h(n));
      if (norm2 <= 0.0) continue;
      const double scale = amp / std::sqrt(norm2);
      for (int n : g.antennas) ref.b[static_cast<size_t>(k)](n) = scale * h(n);
    }
  }
  return ref;
}

}  // namespace

ConstraintCounts SubproblemSpec::counts() const {
  ConstraintCounts c;
  for (const auto& g : config.constraint_groups()) {
    if (g.budget > 0.0) ++c.power;
  }
  c.per_user_inequalities = 4 * config.num_users;
  c.equalities = config.num_users;
  return c;
}

void SubproblemSpec::validate() const {
  config.validate();
  check_dimensions(config, channels);
  const int k_users = config.num_users;
  if (nu.size() != k_users || tau.size() != k_users || eta.size() != k_users) {
    throw InvalidInput("subproblem: nu, tau, eta must have length K");
  }
  if (!(floor > 0.0)) throw InvalidInput("subproblem: floor must be positive");
  if (!(tolerance > 0.0)) throw InvalidInput("subproblem: tolerance must be positive");
  if (max_iterations < 1) throw InvalidInput("subproblem: max_iterations must be positive");
  if ((nu.array() <= 0.0).any() || (tau.array() < floor).any() || (eta.array() < floor).any()) {
    throw InvalidInput("subproblem: nu must be positive and tau, eta at least the floor");
  }
}

SubproblemSpec build_subproblem(const SystemConfig& config, const ChannelSet& channels,
                                const AuxState& aux, double floor, double tolerance) {
  SubproblemSpec spec;
  spec.config = config;
  spec.channels = channels;
  spec.nu = aux.nu;
  spec.tau = aux.tau.cwiseMax(floor);
  spec.eta = aux.eta.cwiseMax(floor);
  spec.floor = floor;
  spec.tolerance = tolerance;
  return spec;
}

double subproblem_objective(const SubproblemSpec& spec, const PrecoderSet& precoders,
                            const RVector& t) {
  const RVector r = interference_plus_noise(spec.config, spec.channels, precoders);
  double total = 0.0;
  for (int k = 0; k < spec.config.num_users; ++k) {
    const double c = std::abs(spec.channels.h[static_cast<size_t>(k)].dot(
        precoders.b[static_cast<size_t>(k)]));
    total += spec.nu(k) * aux_user_term(t(k), spec.tau(k), spec.eta(k), c, r(k));
  }
  return total;
}

RVector max_effective_gain(const SystemConfig& config, const ChannelSet& channels) {
  RVector out = RVector::Zero(config.num_users);
  for (const auto& g : config.constraint_groups()) {
    if (g.budget <= 0.0) continue;
    for (int k = 0; k < config.num_users; ++k) {
      double norm2 = 0.0;
      for (int n : g.antennas) norm2 += std::norm(channels.h[static_cast<size_t>(k)](n));
      out(k) += std::sqrt(g.budget * norm2);
    }
  }
  return out;
}

SubproblemSolution solve_subproblem(const SubproblemSpec& spec,
                                    const std::optional<SubproblemSolution>& warm_start) {
  spec.validate();
  const int k_users = spec.config.num_users;
  const RVector c_max = max_effective_gain(spec.config, spec.channels);
  for (int k = 0; k < k_users; ++k) {
    if (spec.floor * spec.floor >= c_max(k) * c_max(k)) {
      throw InfeasibleFloor("user " + std::to_string(k) + " cannot reach the effective gain floor " +
                            "under the power budgets");
    }
  }

  const detail::SubproblemModel model(spec);
  const auto ineqs = model.inequalities();
  auto strictly_feasible = [&](const Eigen::VectorXd& x) {
    return std::all_of(ineqs.begin(), ineqs.end(),
                       [&](const detail::DiagQuadraticConstraint& c) { return c.value(x) < 0.0; });
  };

  const PrecoderSet ref = reference_point(spec.config, spec.channels);
  const Eigen::VectorXd x_ref = model.pack(ref, RVector::Constant(k_users, 0.5));
  if (!strictly_feasible(x_ref)) {
    throw InfeasibleFloor("no strictly feasible starting point: effective gain floor too large");
  }

  Eigen::VectorXd x0 = x_ref;
  std::optional<double> warm_objective;
  PrecoderSet warm_rotated;
  if (warm_start) {
    warm_rotated = phase_rotate(spec.channels, warm_start->precoders);
    const Eigen::VectorXd x_warm = model.pack(warm_rotated, warm_start->t);
    for (double theta : {0.0, 1e-4, 1e-3, 1e-2, 1e-1, 0.5}) {
      Eigen::VectorXd cand = (1.0 - theta) * x_warm + theta * x_ref;
      // t is unconstrained; keep the warm value.
      cand.tail(k_users) = x_warm.tail(k_users);
      if (strictly_feasible(cand)) {
        x0 = cand;
        break;
      }
    }
    bool warm_ok = satisfies_budgets(spec.config, warm_rotated);
    for (int k = 0; k < k_users && warm_ok; ++k) {
      warm_ok = std::abs(spec.channels.h[static_cast<size_t>(k)].dot(
                    warm_rotated.b[static_cast<size_t>(k)])) >= spec.floor;
    }
    if (warm_ok) warm_objective = subproblem_objective(spec, warm_rotated, warm_start->t);
  }

  detail::SmoothObjective objective;
  objective.value = [&](const Eigen::VectorXd& x) { return model.value(x); };
  objective.derivatives = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g, Eigen::MatrixXd& h) {
    model.derivatives(x, g, h);
  };
  detail::InteriorPointOptions opts;
  opts.tolerance = spec.tolerance;
  opts.max_iterations = spec.max_iterations;
  const Eigen::MatrixXd a_eq = model.equality_matrix();
  const detail::InteriorPointResult ipm = detail::solve_interior_point(
      objective, ineqs, a_eq, Eigen::VectorXd::Zero(k_users), x0, opts);

  SubproblemSolution sol;
  // Remove the residual imaginary part of h_k^H b_k; this only raises c_k.
  sol.precoders = phase_rotate(spec.channels, model.unpack_precoders(ipm.x));
  sol.t = model.unpack_t(ipm.x);
  sol.diagnostics.iterations = ipm.iterations;
  sol.diagnostics.primal_residual = ipm.primal_residual;
  sol.diagnostics.dual_residual = ipm.dual_residual;
  sol.diagnostics.gap = ipm.gap;
  sol.diagnostics.kkt_residual = ipm.kkt_residual();
  sol.diagnostics.exact = ipm.converged;
  sol.diagnostics.objective = subproblem_objective(spec, sol.precoders, sol.t);

  if (warm_objective && sol.diagnostics.objective > *warm_objective) {
    sol.precoders = warm_rotated;
    sol.t = warm_start->t;
    sol.diagnostics.objective = *warm_objective;
    sol.diagnostics.kept_warm_start = true;
  }

  sol.r = interference_plus_noise(spec.config, spec.channels, sol.precoders);
  sol.c.resize(k_users);
  for (int k = 0; k < k_users; ++k) {
    sol.c(k) = spec.channels.h[static_cast<size_t>(k)]
                   .dot(sol.precoders.b[static_cast<size_t>(k)])
                   .real();
  }
  sol.f = sol.t.array().square();
  sol.x = (sol.t.array() - 1.0).square();
  return sol;
}

SubproblemSolution apply_floors(SubproblemSolution solution, double floor) {
  solution.c = solution.c.cwiseMax(floor);
  return solution;
}

}  // namespace coordbeam
