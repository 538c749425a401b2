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

// Dense log-barrier interior-point method (equality-constrained Newton
// centering steps, barrier weight raised between centerings) for
//
//   minimize    f0(x)
//   subject to  g_i(x) = 0.5 x^T diag(p_i) x + q_i^T x + s_i <= 0
//               A x = b
//
// with f0 smooth and convex on the strict interior. The starting point must
// satisfy every inequality strictly after its least-norm projection onto
// A x = b; equalities themselves may be violated.
// Multipliers are recovered from the barrier center: lambda_i = -1/(t g_i).

#include <functional>
#include <vector>

#include <Eigen/Core>

namespace coordbeam::detail {

struct DiagQuadraticConstraint {
  /// Diagonal of the (positive semidefinite) Hessian; empty for linear rows.
  Eigen::VectorXd hess_diag;
  Eigen::VectorXd linear;
  double offset = 0.0;

  double value(const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
};

struct SmoothObjective {
  std::function<double(const Eigen::VectorXd&)> value;
  /// Fills gradient and Hessian at x.
  std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&, Eigen::MatrixXd&)> derivatives;
};

struct InteriorPointOptions {
  double tolerance = 1e-8;
  int max_iterations = 200;
  /// Barrier parameter growth factor.
  double mu = 10.0;
  /// Diagonal damping of the Newton system.
  double damping = 1e-10;
};

struct InteriorPointResult {
  Eigen::VectorXd x;
  Eigen::VectorXd lambda;
  Eigen::VectorXd nu;
  double objective = 0.0;
  int iterations = 0;
  double primal_residual = 0.0;
  /// Dual residual divided by (1 + |grad f0|_inf).
  double dual_residual = 0.0;
  /// Surrogate duality gap divided by (1 + |f0|).
  double gap = 0.0;
  bool converged = false;

  double kkt_residual() const;
};

InteriorPointResult solve_interior_point(const SmoothObjective& objective,
                                         const std::vector<DiagQuadraticConstraint>& ineqs,
                                         const Eigen::MatrixXd& a_eq, const Eigen::VectorXd& b_eq,
                                         const Eigen::VectorXd& x0,
                                         const InteriorPointOptions& options);

}  // namespace coordbeam::detail
