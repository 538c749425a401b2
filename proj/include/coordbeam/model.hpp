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

// System model for a cluster of coordinated base stations serving
// single-antenna users. All antennas of all base stations are stacked into
// one length-N vector, BS blocks contiguous in BS order:
//
//   [ bs 0 antennas | bs 1 antennas | ... | bs L-1 antennas ]
//
// Channels and precoders share this layout. Per-BS views are derived on
// demand and never stored.

#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace coordbeam {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Raised for inconsistent dimensions or values violating a type invariant.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A sum-power budget shared by a set of antennas. One group per antenna is
/// the per-antenna constraint; a single group over all antennas is the total
/// power constraint.
struct PowerGroup {
  std::vector<int> antennas;
  double budget = 0.0;
};

struct SystemConfig {
  std::vector<int> antennas_per_bs;
  int num_users = 0;
  /// Per-antenna budget p_n, length N.
  RVector antenna_power;
  /// Noise variance per user, length K.
  RVector noise_var;
  /// MSE weights; all-ones when absent.
  std::optional<RVector> mse_weights;
  /// When non-empty, these groups replace the per-antenna constraints. They
  /// must partition the antennas.
  std::vector<PowerGroup> power_groups;

  int num_bs() const { return static_cast<int>(antennas_per_bs.size()); }
  int num_antennas() const;
  /// First stacked antenna index belonging to base station `bs`.
  int bs_offset(int bs) const;

  /// The power constraints actually in force.
  std::vector<PowerGroup> constraint_groups() const;
  /// Budget of the group that contains each antenna, length N.
  RVector group_budget_per_antenna() const;
  /// Antennas that may radiate (their group has a positive budget).
  std::vector<int> active_antennas() const;
  double total_power() const;
  RVector weights() const;

  /// Throws InvalidInput on any violated invariant.
  void validate() const;

  /// Convenience: L base stations with `per_bs` antennas each, equal
  /// per-antenna budget and equal noise.
  static SystemConfig uniform(int num_bs, int per_bs, int num_users, double antenna_power,
                              double noise_var);
};

struct ChannelSet {
  /// h[k] is user k's stacked channel, length N.
  std::vector<CVector> h;

  int num_users() const { return static_cast<int>(h.size()); }
  int num_antennas() const { return h.empty() ? 0 : static_cast<int>(h.front().size()); }
  /// Block of user k's channel belonging to base station `bs`.
  CVector bs_block(const SystemConfig& config, int user, int bs) const;
};

struct PrecoderSet {
  std::vector<CVector> b;

  int num_users() const { return static_cast<int>(b.size()); }
  int num_antennas() const { return b.empty() ? 0 : static_cast<int>(b.front().size()); }
  CVector bs_block(const SystemConfig& config, int user, int bs) const;

  static PrecoderSet zeros(int num_users, int num_antennas);
};

struct LinkMetrics {
  RVector sinr;
  /// Bits per channel use.
  RVector rate;
  /// (1 + sinr)^-1
  RVector mmse;
};

/// Throws InvalidInput when channels or precoders do not match the config.
void check_dimensions(const SystemConfig& config, const ChannelSet& channels);
void check_dimensions(const SystemConfig& config, const ChannelSet& channels,
                      const PrecoderSet& precoders);

/// |h_k^H b_i|^2 for all (k, i); entry (k, i).
Eigen::MatrixXd gain_matrix(const ChannelSet& channels, const PrecoderSet& precoders);

/// psi_k = |h_k^H b_k|^2 / (sum_{i != k} |h_k^H b_i|^2 + sigma_k^2)
RVector sinr(const SystemConfig& config, const ChannelSet& channels,
             const PrecoderSet& precoders);

LinkMetrics link_metrics(const SystemConfig& config, const ChannelSet& channels,
                         const PrecoderSet& precoders);

double sum_rate(const SystemConfig& config, const ChannelSet& channels,
                const PrecoderSet& precoders);

/// sum_k w_k (1 + psi_k)^-1 with the config's MSE weights.
double weighted_mse_objective(const SystemConfig& config, const ChannelSet& channels,
                              const PrecoderSet& precoders);

/// Entry n is sum_k |b_{k,n}|^2.
RVector per_antenna_power(const PrecoderSet& precoders);

/// Rotates every b_k by a unit-modulus scalar so h_k^H b_k is real and
/// nonnegative. Users with h_k^H b_k == 0 are left unchanged.
PrecoderSet phase_rotate(const ChannelSet& channels, const PrecoderSet& precoders);

struct FeasibilityReport {
  bool feasible = true;
  /// max over constraints of (used - budget); negative when every
  /// constraint has slack.
  double max_violation = 0.0;
};

FeasibilityReport check_feasible(const SystemConfig& config, const PrecoderSet& precoders,
                                 double tol);

}  // namespace coordbeam
