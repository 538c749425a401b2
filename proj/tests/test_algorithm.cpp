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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "coordbeam/algorithm.hpp"
#include "coordbeam/sim.hpp"
#include "test_support.hpp"

namespace coordbeam {
namespace {

using testing::random_channels;

double matched_filter_rate(const SystemConfig& cfg, const CVector& h) {
  double gain = 0.0;
  for (Eigen::Index n = 0; n < h.size(); ++n) gain += std::sqrt(cfg.antenna_power(n)) * std::abs(h(n));
  return std::log2(1.0 + gain * gain / cfg.noise_var(0));
}

void expect_monotone(const SolveResult& r) {
  for (size_t i = 1; i < r.trace.size(); ++i) {
    EXPECT_LE(r.trace[i].objective, r.trace[i - 1].objective + 1e-9) << "iteration " << i + 1;
  }
}

TEST(Initialize, SingleNonzeroAntenna) {
  SystemConfig cfg = SystemConfig::uniform(1, 2, 1, 2.0, 0.5);
  CVector h(2);
  h << 1.0, 0.0;
  for (InitMode mode : {InitMode::kPerAntenna, InitMode::kGlobalScale}) {
    const Initialization init = initialize(cfg, ChannelSet{{h}}, mode);
    EXPECT_NEAR(std::abs(init.precoders.b[0](0) - Complex(std::sqrt(2.0), 0.0)), 0.0, 1e-15);
    EXPECT_EQ(init.precoders.b[0](1), Complex(0.0, 0.0));
    const double psi = 2.0 / 0.5;
    EXPECT_NEAR(init.t(0), psi / (1.0 + psi), 1e-15);
  }
}

TEST(Initialize, FeasibleWithTightAntennas) {
  std::mt19937_64 rng(1);
  const SystemConfig cfg = SystemConfig::uniform(2, 2, 4, 2.0, 0.1);
  const ChannelSet ch = random_channels(rng, 4, 4);
  const RVector per_antenna = per_antenna_power(initialize(cfg, ch, InitMode::kPerAntenna).precoders);
  EXPECT_LE((per_antenna - cfg.antenna_power).cwiseAbs().maxCoeff(), 1e-10);

  const RVector global = per_antenna_power(initialize(cfg, ch, InitMode::kGlobalScale).precoders);
  EXPECT_LE((global - cfg.antenna_power).maxCoeff(), 1e-10);
  EXPECT_NEAR((global - cfg.antenna_power).maxCoeff(), 0.0, 1e-10);
}

TEST(Initialize, SymmetricUsersGetSymmetricPrecoders) {
  const SystemConfig cfg = SystemConfig::uniform(1, 2, 2, 1.0, 0.1);
  CVector h1(2);
  CVector h2(2);
  h1 << 1.0, 0.5;
  h2 << 0.5, 1.0;
  const Initialization init = initialize(cfg, ChannelSet{{h1, h2}});
  EXPECT_NEAR(std::abs(init.precoders.b[0](0) - init.precoders.b[1](1)), 0.0, 1e-15);
  EXPECT_NEAR(init.t(0), init.t(1), 1e-15);
}

TEST(Initialize, RejectsAllZeroChannels) {
  const SystemConfig cfg = SystemConfig::uniform(1, 2, 2, 1.0, 0.1);
  const ChannelSet zero{{CVector::Zero(2), CVector::Zero(2)}};
  EXPECT_THROW(initialize(cfg, zero), InvalidInput);
}

TEST(Run, SingleUserReachesMatchedFilterOptimum) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> power(0.5, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    SystemConfig cfg = SystemConfig::uniform(1, 4, 1, 1.0, 0.3);
    for (int n = 0; n < 4; ++n) cfg.antenna_power(n) = power(rng);
    const ChannelSet ch = random_channels(rng, 1, 4);
    const SolveResult r = run(cfg, ch);
    EXPECT_EQ(r.status, SolveStatus::kConverged);
    EXPECT_LE(r.iterations, 3);
    EXPECT_NEAR(r.sum_rate, matched_filter_rate(cfg, ch.h[0]), 1e-4);
  }
}

TEST(Run, OrthogonalChannelsDecouple) {
  const SystemConfig cfg = SystemConfig::uniform(1, 2, 2, 1.0, 0.1);
  CVector h1(2);
  CVector h2(2);
  h1 << Complex(0.8, -0.3), 0.0;
  h2 << 0.0, Complex(0.2, 1.1);
  const SolveResult r = run(cfg, ChannelSet{{h1, h2}});
  EXPECT_NEAR(r.metrics.rate(0), std::log2(1.0 + std::norm(h1(0)) / 0.1), 1e-3);
  EXPECT_NEAR(r.metrics.rate(1), std::log2(1.0 + std::norm(h2(1)) / 0.1), 1e-3);
}

TEST(Run, MonotoneFeasibleAndConvergedOnTwoCellSetup) {
  const SystemConfig cfg = SystemConfig::uniform(2, 2, 4, 2.0, 0.1);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ChannelSet ch = gen_channels(seed, cfg);
    const SolveResult r = run(cfg, ch);
    EXPECT_EQ(r.status, SolveStatus::kConverged) << "seed " << seed;
    EXPECT_LE(r.iterations, 100);
    expect_monotone(r);
    for (const auto& rec : r.trace) EXPECT_LE(rec.max_power_violation, 1e-8);
    EXPECT_TRUE(check_feasible(cfg, r.precoders, 1e-8).feasible);
    EXPECT_GT(r.sum_rate, sum_rate(cfg, ch, mrt_baseline(cfg, ch)));
  }
}

TEST(Run, IterationCapIsReported) {
  const SystemConfig cfg = SystemConfig::uniform(2, 2, 4, 2.0, 0.1);
  SolveOptions opts;
  opts.max_outer_iters = 1;
  const SolveResult r = run(cfg, gen_channels(3, cfg), opts);
  EXPECT_EQ(r.status, SolveStatus::kIterCap);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_EQ(r.trace.size(), 1u);
}

TEST(Run, RejectsInvalidOptions) {
  const SystemConfig cfg = SystemConfig::uniform(1, 2, 1, 1.0, 0.1);
  const ChannelSet ch = gen_channels(1, cfg);
  SolveOptions opts;
  opts.rel_obj_tol = 0.0;
  EXPECT_THROW(run(cfg, ch, opts), InvalidInput);
  opts = SolveOptions{};
  opts.max_outer_iters = 0;
  EXPECT_THROW(run(cfg, ch, opts), InvalidInput);
}

// Scaling every budget and noise variance by s leaves the SINRs alone and
// scales the power profile by s.
TEST(Run, ScaleCovariance) {
  const SystemConfig cfg = SystemConfig::uniform(2, 2, 3, 2.0, 0.1);
  const ChannelSet ch = gen_channels(7, cfg);
  SystemConfig scaled = cfg;
  const double s = 4.0;
  scaled.antenna_power *= s;
  scaled.noise_var *= s;
  const SolveResult a = run(cfg, ch);
  const SolveResult b = run(scaled, ch);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(b.metrics.sinr(k), a.metrics.sinr(k), 1e-3 * a.metrics.sinr(k));
  for (int n = 0; n < 4; ++n) EXPECT_NEAR(b.antenna_power(n), s * a.antenna_power(n), 1e-3 * s);
}

TEST(Run, TotalPowerGroupIsRespected) {
  SystemConfig cfg = SystemConfig::uniform(2, 2, 3, 1.0, 0.1);
  cfg.power_groups = {{{0, 1, 2, 3}, 6.0}};
  const SolveResult r = run(cfg, gen_channels(9, cfg));
  EXPECT_LE(r.antenna_power.sum(), 6.0 + 1e-8);
  expect_monotone(r);
}

TEST(RunWeightedMse, TraceIsMonotone) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> weight(0.5, 3.0);
  const SystemConfig cfg = SystemConfig::uniform(2, 2, 4, 2.0, 0.1);
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    RVector w(4);
    for (int k = 0; k < 4; ++k) w(k) = weight(rng);
    const SolveResult r = run_weighted_mse(cfg, gen_channels(seed, cfg), w);
    expect_monotone(r);
    for (size_t i = 1; i < r.trace.size(); ++i) {
      EXPECT_LE(r.trace[i].weighted_mse, r.trace[i - 1].weighted_mse + 1e-6);
    }
  }
}

TEST(RunWeightedMse, SingleUserMatchesSumRateDesign) {
  const SystemConfig cfg = SystemConfig::uniform(1, 3, 1, 1.5, 0.2);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ChannelSet ch = gen_channels(seed, cfg);
    const SolveResult rate = run(cfg, ch);
    const SolveResult mse = run_weighted_mse(cfg, ch, RVector::Ones(1));
    EXPECT_LE((rate.precoders.b[0] - mse.precoders.b[0]).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(RunWeightedMse, HeavyWeightGetsSmallestError) {
  const SystemConfig cfg = SystemConfig::uniform(2, 2, 4, 2.0, 0.1);
  RVector w(4);
  w << 1.0, 1e6, 1.0, 1.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SolveResult r = run_weighted_mse(cfg, gen_channels(seed, cfg), w);
    for (int k : {0, 2, 3}) EXPECT_LE(r.metrics.mmse(1), r.metrics.mmse(k)) << "seed " << seed;
  }
}

TEST(RunWeightedMse, SymmetricInstanceEqualizesErrors) {
  const SystemConfig cfg = SystemConfig::uniform(1, 2, 2, 1.0, 0.1);
  CVector h1(2);
  CVector h2(2);
  h1 << 1.0, 0.5;
  h2 << 0.5, 1.0;
  const SolveResult r = run_weighted_mse(cfg, ChannelSet{{h1, h2}}, RVector::Ones(2));
  EXPECT_NEAR(r.metrics.mmse(0), r.metrics.mmse(1), 1e-6);
}

TEST(SwitchedOff, FlagsGainsAtTheFloor) {
  CVector h(2);
  h << 1.0, 0.0;
  CVector on(2);
  on << 0.5, 0.0;
  CVector off(2);
  off << 1e-6, 0.0;
  const std::vector<int> users =
      switched_off_users(ChannelSet{{h, h}}, PrecoderSet{{on, off}}, kDefaultFloor);
  ASSERT_EQ(users.size(), 1u);
  EXPECT_EQ(users[0], 1);
}

}  // namespace
}  // namespace coordbeam
