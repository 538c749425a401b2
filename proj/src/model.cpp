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

#include "coordbeam/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace coordbeam {

namespace {

bool all_finite(const CVector& v) {
  return v.allFinite();
}

}  // namespace

int SystemConfig::num_antennas() const {
  return std::accumulate(antennas_per_bs.begin(), antennas_per_bs.end(), 0);
}

int SystemConfig::bs_offset(int bs) const {
  if (bs < 0 || bs >= num_bs()) throw InvalidInput("bs index out of range");
  return std::accumulate(antennas_per_bs.begin(), antennas_per_bs.begin() + bs, 0);
}

std::vector<PowerGroup> SystemConfig::constraint_groups() const {
  if (!power_groups.empty()) return power_groups;
  std::vector<PowerGroup> groups;
  groups.reserve(static_cast<size_t>(antenna_power.size()));
  for (int n = 0; n < antenna_power.size(); ++n) groups.push_back({{n}, antenna_power(n)});
  return groups;
}

RVector SystemConfig::group_budget_per_antenna() const {
  RVector out = RVector::Zero(num_antennas());
  for (const auto& g : constraint_groups()) {
    for (int n : g.antennas) out(n) = g.budget;
  }
  return out;
}

std::vector<int> SystemConfig::active_antennas() const {
  std::vector<int> active;
  const RVector budgets = group_budget_per_antenna();
  for (int n = 0; n < budgets.size(); ++n) {
    if (budgets(n) > 0.0) active.push_back(n);
  }
  return active;
}

double SystemConfig::total_power() const {
  double total = 0.0;
  for (const auto& g : constraint_groups()) total += g.budget;
  return total;
}

RVector SystemConfig::weights() const {
  if (mse_weights) return *mse_weights;
  return RVector::Ones(num_users);
}

void SystemConfig::validate() const {
  if (antennas_per_bs.empty()) throw InvalidInput("at least one base station is required");
  for (int n : antennas_per_bs) {
    if (n <= 0) throw InvalidInput("antennas_per_bs entries must be positive");
  }
  const int n_ant = num_antennas();
  if (num_users < 1) throw InvalidInput("num_users must be at least 1");
  if (antenna_power.size() != n_ant) {
    throw InvalidInput("antenna_power has length " + std::to_string(antenna_power.size()) +
                       ", expected " + std::to_string(n_ant));
  }
  if (!antenna_power.allFinite() || (antenna_power.array() < 0.0).any()) {
    throw InvalidInput("antenna_power entries must be finite and nonnegative");
  }
  if (noise_var.size() != num_users) {
    throw InvalidInput("noise_var has length " + std::to_string(noise_var.size()) +
                       ", expected " + std::to_string(num_users));
  }
  if (!noise_var.allFinite() || (noise_var.array() <= 0.0).any()) {
    throw InvalidInput("noise_var entries must be finite and positive");
  }
  if (mse_weights) {
    if (mse_weights->size() != num_users) throw InvalidInput("mse_weights must have length K");
    if (!mse_weights->allFinite() || (mse_weights->array() <= 0.0).any()) {
      throw InvalidInput("mse_weights entries must be finite and positive");
    }
  }
  if (!power_groups.empty()) {
    std::vector<int> seen(static_cast<size_t>(n_ant), 0);
    for (const auto& g : power_groups) {
      if (g.antennas.empty()) throw InvalidInput("power group with no antennas");
      if (!std::isfinite(g.budget) || g.budget < 0.0) {
        throw InvalidInput("power group budget must be finite and nonnegative");
      }
      for (int n : g.antennas) {
        if (n < 0 || n >= n_ant) throw InvalidInput("power group antenna index out of range");
        ++seen[static_cast<size_t>(n)];
      }
    }
    if (std::any_of(seen.begin(), seen.end(), [](int c) { return c != 1; })) {
      throw InvalidInput("power groups must partition the antennas");
    }
  }
  if (total_power() <= 0.0) throw InvalidInput("at least one power budget must be positive");
}

SystemConfig SystemConfig::uniform(int num_bs, int per_bs, int num_users, double antenna_power,
                                   double noise_var) {
  SystemConfig c;
  c.antennas_per_bs.assign(static_cast<size_t>(num_bs), per_bs);
  c.num_users = num_users;
  c.antenna_power = RVector::Constant(num_bs * per_bs, antenna_power);
  c.noise_var = RVector::Constant(num_users, noise_var);
  return c;
}

CVector ChannelSet::bs_block(const SystemConfig& config, int user, int bs) const {
  return h.at(static_cast<size_t>(user)).segment(config.bs_offset(bs),
                                                 config.antennas_per_bs[static_cast<size_t>(bs)]);
}

CVector PrecoderSet::bs_block(const SystemConfig& config, int user, int bs) const {
  return b.at(static_cast<size_t>(user)).segment(config.bs_offset(bs),
                                                 config.antennas_per_bs[static_cast<size_t>(bs)]);
}

PrecoderSet PrecoderSet::zeros(int num_users, int num_antennas) {
  return PrecoderSet{std::vector<CVector>(static_cast<size_t>(num_users),
                                          CVector::Zero(num_antennas))};
}

void check_dimensions(const SystemConfig& config, const ChannelSet& channels) {
  const int n_ant = config.num_antennas();
  if (channels.num_users() != config.num_users) {
    throw InvalidInput("channel set has " + std::to_string(channels.num_users()) +
                       " users, expected " + std::to_string(config.num_users));
  }
  for (const auto& h : channels.h) {
    if (h.size() != n_ant) throw InvalidInput("channel vector length does not match N");
    if (!all_finite(h)) throw InvalidInput("channel vector has non-finite entries");
  }
}

void check_dimensions(const SystemConfig& config, const ChannelSet& channels,
                      const PrecoderSet& precoders) {
  check_dimensions(config, channels);
  if (precoders.num_users() != config.num_users) {
    throw InvalidInput("precoder set has " + std::to_string(precoders.num_users()) +
                       " users, expected " + std::to_string(config.num_users));
  }
  for (const auto& b : precoders.b) {
    if (b.size() != config.num_antennas()) {
      throw InvalidInput("precoder vector length does not match N");
    }
    if (!all_finite(b)) throw InvalidInput("precoder vector has non-finite entries");
  }
}

Eigen::MatrixXd gain_matrix(const ChannelSet& channels, const PrecoderSet& precoders) {
  const int k_users = channels.num_users();
  Eigen::MatrixXd gains(k_users, precoders.num_users());
  for (int k = 0; k < k_users; ++k) {
    for (int i = 0; i < precoders.num_users(); ++i) {
      gains(k, i) = std::norm(channels.h[static_cast<size_t>(k)].dot(
          precoders.b[static_cast<size_t>(i)]));
    }
  }
  return gains;
}

RVector sinr(const SystemConfig& config, const ChannelSet& channels,
             const PrecoderSet& precoders) {
  check_dimensions(config, channels, precoders);
  const Eigen::MatrixXd gains = gain_matrix(channels, precoders);
  const int k_users = config.num_users;
  RVector psi(k_users);
  for (int k = 0; k < k_users; ++k) {
    const double interference = gains.row(k).sum() - gains(k, k);
    psi(k) = gains(k, k) / (std::max(interference, 0.0) + config.noise_var(k));
  }
  return psi;
}

LinkMetrics link_metrics(const SystemConfig& config, const ChannelSet& channels,
                         const PrecoderSet& precoders) {
  LinkMetrics m;
  m.sinr = sinr(config, channels, precoders);
  m.rate = m.sinr.unaryExpr([](double s) { return std::log2(1.0 + s); });
  m.mmse = m.sinr.unaryExpr([](double s) { return 1.0 / (1.0 + s); });
  return m;
}

double sum_rate(const SystemConfig& config, const ChannelSet& channels,
                const PrecoderSet& precoders) {
  return link_metrics(config, channels, precoders).rate.sum();
}

double weighted_mse_objective(const SystemConfig& config, const ChannelSet& channels,
                              const PrecoderSet& precoders) {
  const LinkMetrics m = link_metrics(config, channels, precoders);
  return config.weights().dot(m.mmse);
}

RVector per_antenna_power(const PrecoderSet& precoders) {
  RVector power = RVector::Zero(precoders.num_antennas());
  for (const auto& b : precoders.b) power += b.cwiseAbs2();
  return power;
}

PrecoderSet phase_rotate(const ChannelSet& channels, const PrecoderSet& precoders) {
  if (channels.num_users() != precoders.num_users()) {
    throw InvalidInput("phase_rotate: user count mismatch");
  }
  PrecoderSet out = precoders;
  for (size_t k = 0; k < out.b.size(); ++k) {
    const Complex s = channels.h[k].dot(out.b[k]);
    const double mag = std::abs(s);
    if (mag == 0.0) continue;
    out.b[k] *= std::conj(s) / mag;
  }
  return out;
}

FeasibilityReport check_feasible(const SystemConfig& config, const PrecoderSet& precoders,
                                 double tol) {
  if (tol < 0.0) throw InvalidInput("check_feasible: tol must be nonnegative");
  if (precoders.num_antennas() != config.num_antennas()) {
    throw InvalidInput("check_feasible: precoder length does not match N");
  }
  const RVector power = per_antenna_power(precoders);
  FeasibilityReport report;
  report.max_violation = -std::numeric_limits<double>::infinity();
  for (const auto& g : config.constraint_groups()) {
    double used = 0.0;
    for (int n : g.antennas) used += power(n);
    report.max_violation = std::max(report.max_violation, used - g.budget);
  }
  report.feasible = report.max_violation <= tol;
  return report;
}

}  // namespace coordbeam
