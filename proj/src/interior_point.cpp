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

#include "interior_point.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace coordbeam::detail {

// Accumulated in extended precision: near an active constraint the slack is
// many orders of magnitude below the budget, and the multiplier estimates
// divide by it.
double DiagQuadraticConstraint::value(const Eigen::VectorXd& x) const {
  long double v = offset;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const long double xi = x(i);
    v += static_cast<long double>(linear(i)) * xi;
    if (hess_diag.size() > 0) v += 0.5L * static_cast<long double>(hess_diag(i)) * xi * xi;
  }
  return static_cast<double>(v);
}

Eigen::VectorXd DiagQuadraticConstraint::gradient(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g = linear;
  if (hess_diag.size() > 0) g.array() += hess_diag.array() * x.array();
  return g;
}

double InteriorPointResult::kkt_residual() const {
  return std::max({primal_residual, dual_residual, gap});
}

InteriorPointResult solve_interior_point(const SmoothObjective& objective,
                                         const std::vector<DiagQuadraticConstraint>& ineqs,
                                         const Eigen::MatrixXd& a_eq, const Eigen::VectorXd& b_eq,
                                         const Eigen::VectorXd& x0,
                                         const InteriorPointOptions& options) {
  const int n = static_cast<int>(x0.size());
  const int m = static_cast<int>(ineqs.size());
  const int p = static_cast<int>(a_eq.rows());

  InteriorPointResult res;
  res.x = x0;
  res.nu = Eigen::VectorXd::Zero(p);
  res.lambda = Eigen::VectorXd::Zero(m);

  auto constraint_values = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd g(m);
    for (int i = 0; i < m; ++i) g(i) = ineqs[static_cast<size_t>(i)].value(x);
    return g;
  };
  auto strictly_feasible = [&](const Eigen::VectorXd& x) {
    for (const auto& c : ineqs) {
      if (!(c.value(x) < 0.0)) return false;
    }
    return true;
  };
  // Least-norm correction onto the affine set, so centering starts
  // equality-feasible. A start already on the set up to rounding is kept if
  // the correction would push it onto an inequality boundary.
  if (p > 0) {
    const Eigen::VectorXd residual = a_eq * res.x - b_eq;
    const Eigen::VectorXd projected =
        res.x - a_eq.transpose() * (a_eq * a_eq.transpose()).ldlt().solve(residual);
    if (strictly_feasible(projected) || !strictly_feasible(res.x)) res.x = projected;
  }
  if (!strictly_feasible(res.x)) {
    throw std::invalid_argument("interior point: starting point is not strictly feasible");
  }

  Eigen::VectorXd grad0(n);
  Eigen::MatrixXd hess0(n, n);
  // Barrier function t f0(x) - sum log(-g_i(x)).
  auto barrier = [&](const Eigen::VectorXd& x, double t) {
    double v = t * objective.value(x);
    for (const auto& c : ineqs) v -= std::log(-c.value(x));
    return v;
  };

  double t = m > 0 ? static_cast<double>(m) / (1.0 + std::abs(objective.value(res.x))) : 1.0;
  int newton_steps = 0;
  bool budget_exhausted = false;

  while (true) {
    // Centering by equality-constrained Newton.
    while (true) {
      if (newton_steps >= options.max_iterations) {
        budget_exhausted = true;
        break;
      }
      objective.derivatives(res.x, grad0, hess0);
      const Eigen::VectorXd g = constraint_values(res.x);
      Eigen::VectorXd grad = t * grad0;
      Eigen::MatrixXd hess = t * hess0;
      for (int i = 0; i < m; ++i) {
        const auto& c = ineqs[static_cast<size_t>(i)];
        const Eigen::VectorXd gi = c.gradient(res.x);
        const double inv = 1.0 / -g(i);
        grad += inv * gi;
        if (c.hess_diag.size() > 0) hess.diagonal() += inv * c.hess_diag;
        hess.noalias() += (inv * inv) * gi * gi.transpose();
      }
      hess.diagonal().array() += options.damping;
      Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + p, n + p);
      kkt.topLeftCorner(n, n) = hess;
      Eigen::VectorXd rhs(n + p);
      rhs.head(n) = -grad;
      if (p > 0) {
        kkt.topRightCorner(n, p) = a_eq.transpose();
        kkt.bottomLeftCorner(p, n) = a_eq;
        rhs.tail(p) = -(a_eq * res.x - b_eq);
      }
      const Eigen::VectorXd sol = kkt.partialPivLu().solve(rhs);
      const Eigen::VectorXd dx = sol.head(n);
      if (!dx.allFinite()) {
        budget_exhausted = true;
        break;
      }
      res.nu = sol.tail(p) / t;
      ++newton_steps;

      const double decrement2 = dx.dot(hess * dx);
      if (decrement2 / 2.0 <= 1e-16) break;

      double s = 1.0;
      while (s > 1e-16 && !strictly_feasible(res.x + s * dx)) s *= 0.5;
      const double phi0 = barrier(res.x, t);
      const double slope = grad.dot(dx);
      const double slack = 1e-13 * std::abs(phi0);
      while (s > 1e-16 && barrier(res.x + s * dx, t) > phi0 + 0.01 * s * slope + slack) s *= 0.5;
      if (s <= 1e-16) break;
      res.x += s * dx;
      // Rounding floor: a damped step this close to the center makes no progress.
      if (s < 1.0 && decrement2 / 2.0 <= 1e-10) break;
    }

    // Dual estimates and KKT diagnostics at the current center.
    objective.derivatives(res.x, grad0, hess0);
    res.objective = objective.value(res.x);
    const Eigen::VectorXd g = constraint_values(res.x);
    Eigen::VectorXd r_dual = grad0;
    for (int i = 0; i < m; ++i) {
      res.lambda(i) = 1.0 / (-t * g(i));
      r_dual += res.lambda(i) * ineqs[static_cast<size_t>(i)].gradient(res.x);
    }
    if (p > 0) r_dual += a_eq.transpose() * res.nu;
    res.primal_residual = p > 0 ? (a_eq * res.x - b_eq).lpNorm<Eigen::Infinity>() : 0.0;
    res.dual_residual = r_dual.lpNorm<Eigen::Infinity>() / (1.0 + grad0.lpNorm<Eigen::Infinity>());
    res.gap = (m / t) / (1.0 + std::abs(res.objective));
    res.iterations = newton_steps;
    if (res.kkt_residual() <= options.tolerance) {
      res.converged = true;
      break;
    }
    if (budget_exhausted || res.gap <= options.tolerance) break;
    // Land the final gap at half the tolerance instead of overshooting: the
    // multiplier estimates lose accuracy as t grows.
    const double t_final = m / (0.5 * options.tolerance * (1.0 + std::abs(res.objective)));
    t = std::min(t * options.mu, std::max(t_final, t * 1.5));
  }
  return res;
}

}  // namespace coordbeam::detail
