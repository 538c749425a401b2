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

#include "coordbeam/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <thread>

#include <Eigen/Dense>

namespace coordbeam {

namespace {

double uniform53(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::pair<double, double> box_muller(std::mt19937_64& rng) {
  const double u1 = 1.0 - uniform53(rng);
  const double u2 = uniform53(rng);
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {rad * std::cos(angle), rad * std::sin(angle)};
}

double real_inner(const PrecoderSet& a, const PrecoderSet& b) {
  double s = 0.0;
  for (size_t k = 0; k < a.b.size(); ++k) s += a.b[k].dot(b.b[k]).real();
  return s;
}

PrecoderSet axpy(const PrecoderSet& x, double alpha, const PrecoderSet& d) {
  PrecoderSet out = x;
  for (size_t k = 0; k < out.b.size(); ++k) out.b[k] += alpha * d.b[k];
  return out;
}

// Real gradient of the sum rate, packed as complex vectors.
PrecoderSet sum_rate_gradient(const SystemConfig& config, const ChannelSet& channels,
                              const PrecoderSet& b) {
  const int k_users = config.num_users;
  const Eigen::MatrixXd gains = gain_matrix(channels, b);
  RVector inv_total(k_users);
  RVector inv_interf(k_users);
  for (int k = 0; k < k_users; ++k) {
    const double total = gains.row(k).sum() + config.noise_var(k);
    inv_total(k) = 1.0 / total;
    inv_interf(k) = 1.0 / (total - gains(k, k));
  }
  PrecoderSet grad = PrecoderSet::zeros(k_users, config.num_antennas());
  const double scale = 2.0 / std::numbers::ln2;
  for (int i = 0; i < k_users; ++i) {
    for (int k = 0; k < k_users; ++k) {
      const CVector& h = channels.h[static_cast<size_t>(k)];
      const Complex proj = h.dot(b.b[static_cast<size_t>(i)]);
      const double w = inv_total(k) - (i == k ? 0.0 : inv_interf(k));
      grad.b[static_cast<size_t>(i)] += (scale * w * proj) * h;
    }
  }
  return grad;
}

}  // namespace

ChannelSet gen_channels(std::uint64_t seed, const SystemConfig& config) {
  std::mt19937_64 rng(seed);
  ChannelSet channels;
  const int n_ant = config.num_antennas();
  channels.h.assign(static_cast<size_t>(config.num_users), CVector(n_ant));
  for (auto& h : channels.h) {
    for (int n = 0; n < n_ant; ++n) {
      const auto [g1, g2] = box_muller(rng);
      h(n) = Complex(g1, g2) / std::numbers::sqrt2;
    }
  }
  return channels;
}

std::uint64_t realization_seed(std::uint64_t master_seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

PrecoderSet mrt_baseline(const SystemConfig& config, const ChannelSet& channels) {
  config.validate();
  check_dimensions(config, channels);
  return matched_filter_per_group(config, channels);
}

PrecoderSet zf_baseline(const SystemConfig& config, const ChannelSet& channels) {
  config.validate();
  check_dimensions(config, channels);
  const std::vector<int> active = config.active_antennas();
  const int k_users = config.num_users;
  const int n_act = static_cast<int>(active.size());
  if (k_users > n_act) {
    throw RankDeficient("zero forcing needs K <= number of powered antennas");
  }
  Eigen::MatrixXcd h_mat(k_users, n_act);
  for (int k = 0; k < k_users; ++k) {
    for (int j = 0; j < n_act; ++j) {
      h_mat(k, j) = std::conj(channels.h[static_cast<size_t>(k)](active[static_cast<size_t>(j)]));
    }
  }
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h_mat);
  const RVector sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 1e-10 * sv(0)) throw RankDeficient("channel matrix is rank deficient");
  const Eigen::MatrixXcd gram = h_mat * h_mat.adjoint();
  const Eigen::MatrixXcd w = h_mat.adjoint() * gram.inverse();

  PrecoderSet b = PrecoderSet::zeros(k_users, config.num_antennas());
  for (int k = 0; k < k_users; ++k) {
    const CVector col = w.col(k) / w.col(k).norm();
    for (int j = 0; j < n_act; ++j) b.b[static_cast<size_t>(k)](active[static_cast<size_t>(j)]) = col(j);
  }
  const RVector power = per_antenna_power(b);
  double alpha = std::numeric_limits<double>::infinity();
  for (const auto& g : config.constraint_groups()) {
    if (g.budget <= 0.0) continue;
    double used = 0.0;
    for (int n : g.antennas) used += power(n);
    if (used > 0.0) alpha = std::min(alpha, std::sqrt(g.budget / used));
  }
  for (auto& bk : b.b) bk *= alpha;
  return b;
}

PrecoderSet project_onto_budgets(const SystemConfig& config, PrecoderSet precoders) {
  const RVector power = per_antenna_power(precoders);
  for (const auto& g : config.constraint_groups()) {
    double used = 0.0;
    for (int n : g.antennas) used += power(n);
    if (used <= g.budget) continue;
    const double scale = g.budget > 0.0 ? std::sqrt(g.budget / used) : 0.0;
    for (int n : g.antennas) {
      for (auto& bk : precoders.b) bk(n) *= scale;
    }
  }
  return precoders;
}

OracleSearchResult oracle_search(const SystemConfig& config, const ChannelSet& channels,
                                 int restarts, std::uint64_t seed) {
  config.validate();
  check_dimensions(config, channels);
  const int k_users = config.num_users;
  const int n_ant = config.num_antennas();
  OracleSearchResult best;
  best.sum_rate = -1.0;
  for (int rs = 0; rs < restarts; ++rs) {
    std::mt19937_64 rng(realization_seed(seed, static_cast<std::uint64_t>(rs)));
    PrecoderSet b = PrecoderSet::zeros(k_users, n_ant);
    for (auto& bk : b.b) {
      for (int n = 0; n < n_ant; ++n) {
        const auto [g1, g2] = box_muller(rng);
        bk(n) = Complex(g1, g2);
      }
    }
    // Start on the budget boundary.
    b = project_onto_budgets(config, b);
    const RVector power = per_antenna_power(b);
    for (const auto& g : config.constraint_groups()) {
      double used = 0.0;
      for (int n : g.antennas) used += power(n);
      if (used <= 0.0) continue;
      const double scale = std::sqrt(g.budget / used);
      for (int n : g.antennas) {
        for (auto& bk : b.b) bk(n) *= scale;
      }
    }

    double rate = sum_rate(config, channels, b);
    double step = 1.0;
    for (int it = 0; it < 3000; ++it) {
      const PrecoderSet grad = sum_rate_gradient(config, channels, b);
      step *= 2.0;
      bool moved = false;
      while (step > 1e-14) {
        const PrecoderSet cand = project_onto_budgets(config, axpy(b, step, grad));
        const PrecoderSet diff = axpy(cand, -1.0, b);
        const double cand_rate = sum_rate(config, channels, cand);
        if (cand_rate >= rate + 1e-4 * real_inner(grad, diff)) {
          moved = cand_rate > rate;
          const double gain = cand_rate - rate;
          b = cand;
          rate = cand_rate;
          if (gain <= 1e-13 * std::max(1.0, rate)) moved = false;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    if (rate > best.sum_rate) {
      best.sum_rate = rate;
      best.precoders = b;
    }
  }
  return best;
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::kAlgorithmI:
      return "algorithm_I";
    case Strategy::kWeightedMse:
      return "weighted_mse";
    case Strategy::kZf:
      return "zf";
    case Strategy::kMrt:
      return "mrt";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for (Strategy s : {Strategy::kAlgorithmI, Strategy::kWeightedMse, Strategy::kZf, Strategy::kMrt}) {
    if (to_string(s) == name) return s;
  }
  throw InvalidInput("unknown strategy '" + std::string(name) +
                     "' (expected algorithm_I, weighted_mse, zf or mrt)");
}

void ExperimentSpec::validate() const {
  config.validate();
  if (num_realizations < 1) throw InvalidInput("realizations must be at least 1");
  if (snr_grid_db.empty()) throw InvalidInput("snr grid must not be empty");
  for (double s : snr_grid_db) {
    if (!std::isfinite(s)) throw InvalidInput("snr values must be finite");
  }
  if (strategies.empty()) throw InvalidInput("at least one strategy is required");
  solve_options.validate();
}

double noise_for_snr(const SystemConfig& config, double snr_db) {
  return config.total_power() / std::pow(10.0, snr_db / 10.0);
}

namespace {

struct Outcome {
  bool ok = false;
  bool capped = false;
  double sum_rate = 0.0;
  RVector power;
  int switched_off = 0;
};

Outcome evaluate_strategy(Strategy strategy, const SystemConfig& config,
                          const ChannelSet& channels, const ExperimentSpec& spec) {
  Outcome out;
  try {
    PrecoderSet b;
    switch (strategy) {
      case Strategy::kAlgorithmI: {
        SolveOptions opts = spec.solve_options;
        opts.objective = ObjectiveKind::kSumRate;
        const SolveResult res = run(config, channels, opts);
        out.capped = res.status != SolveStatus::kConverged;
        b = res.precoders;
        break;
      }
      case Strategy::kWeightedMse: {
        const SolveResult res =
            run_weighted_mse(config, channels, config.weights(), spec.solve_options);
        out.capped = res.status != SolveStatus::kConverged;
        b = res.precoders;
        break;
      }
      case Strategy::kZf:
        b = zf_baseline(config, channels);
        break;
      case Strategy::kMrt:
        b = mrt_baseline(config, channels);
        break;
    }
    if (!check_feasible(config, b, 1e-8).feasible) return out;
    out.sum_rate = sum_rate(config, channels, b);
    out.power = per_antenna_power(b);
    out.switched_off = static_cast<int>(
        switched_off_users(channels, b, spec.solve_options.floor).size());
    out.ok = std::isfinite(out.sum_rate);
  } catch (const std::exception&) {
    out.ok = false;
  }
  return out;
}

}  // namespace

SweepTable run_sweep(const ExperimentSpec& spec) {
  spec.validate();
  const int n_snr = static_cast<int>(spec.snr_grid_db.size());
  const int n_strat = static_cast<int>(spec.strategies.size());
  const int n_real = spec.num_realizations;
  const int n_ant = spec.config.num_antennas();

  // outcomes[(s * n_strat + q) * n_real + r]
  std::vector<Outcome> outcomes(static_cast<size_t>(n_snr * n_strat * n_real));
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int r = next.fetch_add(1); r < n_real; r = next.fetch_add(1)) {
      const ChannelSet channels =
          gen_channels(realization_seed(spec.seed, static_cast<std::uint64_t>(r)), spec.config);
      for (int s = 0; s < n_snr; ++s) {
        SystemConfig cfg = spec.config;
        cfg.noise_var = RVector::Constant(cfg.num_users, noise_for_snr(cfg, spec.snr_grid_db[static_cast<size_t>(s)]));
        for (int q = 0; q < n_strat; ++q) {
          outcomes[static_cast<size_t>((s * n_strat + q) * n_real + r)] =
              evaluate_strategy(spec.strategies[static_cast<size_t>(q)], cfg, channels, spec);
        }
      }
    }
  };
  const int n_threads = std::clamp(spec.threads, 1, n_real);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SweepTable table;
  table.num_antennas = n_ant;
  for (int s = 0; s < n_snr; ++s) {
    for (int q = 0; q < n_strat; ++q) {
      SweepRow row;
      row.snr_db = spec.snr_grid_db[static_cast<size_t>(s)];
      row.strategy = spec.strategies[static_cast<size_t>(q)];
      row.mean_power = RVector::Zero(n_ant);
      int switched_off = 0;
      for (int r = 0; r < n_real; ++r) {
        const Outcome& o = outcomes[static_cast<size_t>((s * n_strat + q) * n_real + r)];
        if (o.capped) ++row.num_capped;
        if (!o.ok || (o.capped && !spec.include_capped_runs)) {
          ++row.num_failed;
          continue;
        }
        row.sum_rates.push_back(o.sum_rate);
        row.mean_power += o.power;
        switched_off += o.switched_off;
      }
      row.num_scored = static_cast<int>(row.sum_rates.size());
      if (row.num_scored > 0) {
        double sum = 0.0;
        for (double v : row.sum_rates) sum += v;
        row.mean_sum_rate = sum / row.num_scored;
        double ss = 0.0;
        for (double v : row.sum_rates) ss += (v - row.mean_sum_rate) * (v - row.mean_sum_rate);
        row.std_sum_rate = row.num_scored > 1 ? std::sqrt(ss / (row.num_scored - 1)) : 0.0;
        row.mean_power /= row.num_scored;
        row.frac_switched_off =
            static_cast<double>(switched_off) / (row.num_scored * spec.config.num_users);
      } else {
        row.mean_sum_rate = std::numeric_limits<double>::quiet_NaN();
        row.std_sum_rate = std::numeric_limits<double>::quiet_NaN();
        row.mean_power.setConstant(std::numeric_limits<double>::quiet_NaN());
      }
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

void write_sweep_csv(std::ostream& out, const SweepTable& table) {
  out << "snr_db,strategy,mean_sum_rate,std_sum_rate";
  for (int n = 1; n <= table.num_antennas; ++n) out << ",mean_power_" << n;
  out << ",frac_switched_off\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::string(buf);
  };
  for (const auto& row : table.rows) {
    out << num(row.snr_db) << ',' << to_string(row.strategy) << ',' << num(row.mean_sum_rate) << ','
        << num(row.std_sum_rate);
    for (int n = 0; n < table.num_antennas; ++n) out << ',' << num(row.mean_power(n));
    out << ',' << num(row.frac_switched_off) << '\n';
  }
}

}  // namespace coordbeam
