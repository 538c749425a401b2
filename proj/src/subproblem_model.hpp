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

// Real parametrization of the precoder subproblem. Only antennas with a
// positive group budget carry variables; the rest are pinned to zero.
//
// x = [ Re b_0(A), Im b_0(A), ..., Re b_{K-1}(A), Im b_{K-1}(A), t_0..t_{K-1} ]
//
// where A is the list of active antennas.

#include <vector>

#include <Eigen/Core>

#include "coordbeam/precoder_step.hpp"
#include "interior_point.hpp"

namespace coordbeam::detail {

class SubproblemModel {
 public:
  explicit SubproblemModel(const SubproblemSpec& spec);

  int dim() const { return 2 * num_active_ * num_users_ + num_users_; }
  int num_users() const { return num_users_; }

  double value(const Eigen::VectorXd& x) const;
  void derivatives(const Eigen::VectorXd& x, Eigen::VectorXd& grad, Eigen::MatrixXd& hess) const;

  /// Re(h_k^H b_k) and Im(h_k^H b_k) at x.
  double effective_gain(const Eigen::VectorXd& x, int k) const;
  double effective_gain_imag(const Eigen::VectorXd& x, int k) const;
  /// Interference plus noise for user k at x.
  double interference(const Eigen::VectorXd& x, int k) const;

  Eigen::VectorXd pack(const PrecoderSet& precoders, const RVector& t) const;
  PrecoderSet unpack_precoders(const Eigen::VectorXd& x) const;
  RVector unpack_t(const Eigen::VectorXd& x) const;

  std::vector<DiagQuadraticConstraint> inequalities() const;
  Eigen::MatrixXd equality_matrix() const;

 private:
  int block(int k) const { return 2 * num_active_ * k; }
  int t_index(int k) const { return 2 * num_active_ * num_users_ + k; }

  const SubproblemSpec& spec_;
  int num_users_;
  int num_antennas_;
  int num_active_;
  std::vector<int> active_;
  /// Row k: coefficients of Re(h_k^H b) and Im(h_k^H b) on one user block.
  Eigen::MatrixXd a_re_;
  Eigen::MatrixXd a_im_;
};

}  // namespace coordbeam::detail
