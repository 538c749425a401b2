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
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "coordbeam/sim.hpp"

namespace coordbeam {
namespace {

TEST(GenChannels, DeterministicPerSeed) {
  const SystemConfig cfg = SystemConfig::uniform(2, 2, 4, 2.0, 0.1);
  const ChannelSet a = gen_channels(42, cfg);
  const ChannelSet b = gen_channels(42, cfg);
  const ChannelSet c = gen_channels(43, cfg);
  for (int k = 0; k < 4; ++k) EXPECT_EQ(a.h[static_cast<size_t>(k)], b.h[static_cast<size_t>(k)]);
  EXPECT_NE(a.h[0], c.h[0]);
  EXPECT_EQ(a.num_users(), 4);
  EXPECT_EQ(a.num_antennas(), 4);
}

TEST(GenChannels, UnitPowerCircularEntries) {
  const SystemConfig cfg = SystemConfig::uniform(1, 1000, 100, 1.0, 1.0);
  const ChannelSet ch = gen_channels(7, cfg);
  double power = 0.0;
  double re_mean = 0.0;
  double im_mean = 0.0;
  double re2 = 0.0;
  double im2 = 0.0;
  const double count = 1e5;
  for (const auto& h : ch.h) {
    for (Eigen::Index n = 0; n < h.size(); ++n) {
      power += std::norm(h(n));
      re_mean += h(n).real();
      im_mean += h(n).imag();
      re2 += h(n).real() * h(n).real();
      im2 += h(n).imag() * h(n).imag();
    }
  }
  re_mean /= count;
  im_mean /= count;
  EXPECT_NEAR(power / count, 1.0, 1e-2);
  EXPECT_NEAR(re2 / count - re_mean * re_mean, 0.5, 1e-2);
  EXPECT_NEAR(im2 / count - im_mean * im_mean, 0.5, 1e-2);
}

TEST(RealizationSeed, DistinctAcrossIndicesAndMasters) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t m = 0; m < 4; ++m) {
    for (std::uint64_t i = 0; i < 500; ++i) seen.insert(realization_seed(m, i));
  }
  EXPECT_EQ(seen.size(), 2000u);
  EXPECT_EQ(realization_seed(5, 9), realization_seed(5, 9));
}

TEST(Mrt, SingleUserIsMatchedFilterAtFullPower) {
  SystemConfig cfg = SystemConfig::uniform(1, 3, 1, 1.0, 0.5);
  cfg.antenna_power << 1.0, 2.0, 0.5;
  const ChannelSet ch = gen_channels(3, cfg);
  const PrecoderSet b = mrt_baseline(cfg, ch);
  const RVector p = per_antenna_power(b);
  EXPECT_LE((p - cfg.antenna_power).cwiseAbs().maxCoeff(), 1e-12);
  for (int n = 0; n < 3; ++n) {
    // Same phase as the channel entry.
    EXPECT_NEAR(std::arg(b.b[0](n)), std::arg(ch.h[0](n)), 1e-12);
  }
}

TEST(Mrt, FeasibleWithTightAntennaOnRandomInstances) {
  const SystemConfig cfg = SystemConfig::uniform(2, 2, 4, 2.0, 0.1);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const PrecoderSet b = mrt_baseline(cfg, gen_channels(s, cfg));
    const FeasibilityReport rep = check_feasible(cfg, b, 1e-12);
    EXPECT_TRUE(rep.feasible);
    EXPECT_NEAR(rep.max_violation, 0.0, 1e-10);
  }
}

TEST(Zf, OrthonormalChannelsGiveMatchedFilter) {
  const SystemConfig cfg = SystemConfig::uniform(1, 2, 2, 1.0, 0.1);
  CVector h1(2);
  CVector h2(2);
  h1 << 1.0, 0.0;
  h2 << 0.0, Complex(0.0, 1.0);
  const PrecoderSet b = zf_baseline(cfg, ChannelSet{{h1, h2}});
  EXPECT_NEAR(std::abs(b.b[0](1)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(b.b[1](0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(h1.dot(b.b[0])), std::abs(h2.dot(b.b[1])), 1e-12);
}

TEST(Zf, NullsCrossTermsAndIsFeasible) {
  const SystemConfig cfg = SystemConfig::uniform(1, 2, 2, 1.0, 0.1);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const ChannelSet ch = gen_channels(s, cfg);
    const PrecoderSet b = zf_baseline(cfg, ch);
    EXPECT_LE(std::abs(ch.h[0].dot(b.b[1])), 1e-10);
    EXPECT_LE(std::abs(ch.h[1].dot(b.b[0])), 1e-10);
    const FeasibilityReport rep = check_feasible(cfg, b, 1e-12);
    EXPECT_TRUE(rep.feasible);
    EXPECT_NEAR(rep.max_violation, 0.0, 1e-10);
  }
}

TEST(Zf, RejectsMoreUsersThanAntennas) {
  const SystemConfig cfg = SystemConfig::uniform(1, 2, 3, 1.0, 0.1);
  EXPECT_THROW(zf_baseline(cfg, gen_channels(1, cfg)), RankDeficient);
  const SystemConfig two = SystemConfig::uniform(1, 2, 2, 1.0, 0.1);
  CVector h(2);
  h << 1.0, 2.0;
  EXPECT_THROW(zf_baseline(two, ChannelSet{{h, 2.0 * h}}), RankDeficient);
}

TEST(ProjectOntoBudgets, FeasibleAndIdempotent) {
  const SystemConfig cfg = SystemConfig::uniform(2, 2, 3, 1.0, 0.1);
  PrecoderSet b = PrecoderSet{gen_channels(5, cfg).h};
  for (auto& bk : b.b) bk *= 3.0;
  const PrecoderSet p = project_onto_budgets(cfg, b);
  EXPECT_TRUE(check_feasible(cfg, p, 1e-12).feasible);
  const PrecoderSet q = project_onto_budgets(cfg, p);
  for (int k = 0; k < 3; ++k) {
    EXPECT_LE((p.b[static_cast<size_t>(k)] - q.b[static_cast<size_t>(k)]).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(OracleSearch, SingleUserReachesAnalyticOptimum) {
  SystemConfig cfg = SystemConfig::uniform(1, 4, 1, 1.0, 0.5);
  cfg.antenna_power << 0.5, 1.0, 2.0, 1.5;
  const ChannelSet ch = gen_channels(8, cfg);
  double gain = 0.0;
  for (int n = 0; n < 4; ++n) gain += std::sqrt(cfg.antenna_power(n)) * std::abs(ch.h[0](n));
  const double analytic = std::log2(1.0 + gain * gain / 0.5);
  EXPECT_NEAR(oracle_search(cfg, ch, 5, 1).sum_rate, analytic, 1e-4);
}

TEST(OracleSearch, OrthogonalUsersGetInterferenceFreeRates) {
  const SystemConfig cfg = SystemConfig::uniform(1, 2, 2, 1.0, 0.1);
  CVector h1(2);
  CVector h2(2);
  h1 << Complex(0.6, 0.6), 0.0;
  h2 << 0.0, Complex(-0.9, 0.1);
  const double expected =
      std::log2(1.0 + std::norm(h1(0)) / 0.1) + std::log2(1.0 + std::norm(h2(1)) / 0.1);
  const OracleSearchResult r = oracle_search(cfg, ChannelSet{{h1, h2}}, 10, 2);
  EXPECT_NEAR(r.sum_rate, expected, 1e-3);
  EXPECT_TRUE(check_feasible(cfg, r.precoders, 1e-10).feasible);
}

TEST(OracleSearch, DeterministicForSeed) {
  const SystemConfig cfg = SystemConfig::uniform(1, 2, 2, 1.0, 0.1);
  const ChannelSet ch = gen_channels(4, cfg);
  EXPECT_EQ(oracle_search(cfg, ch, 8, 3).sum_rate, oracle_search(cfg, ch, 8, 3).sum_rate);
}

TEST(NoiseForSnr, UsesTotalBudget) {
  const SystemConfig cfg = SystemConfig::uniform(2, 2, 4, 2.5, 1.0);
  EXPECT_NEAR(noise_for_snr(cfg, 10.0), 1.0, 1e-15);
  EXPECT_NEAR(noise_for_snr(cfg, 0.0), 10.0, 1e-15);
}

TEST(Strategy, NamesRoundTrip) {
  for (Strategy s : {Strategy::kAlgorithmI, Strategy::kWeightedMse, Strategy::kZf, Strategy::kMrt}) {
    EXPECT_EQ(parse_strategy(to_string(s)), s);
  }
  EXPECT_THROW(parse_strategy("dpc"), InvalidInput);
}

ExperimentSpec small_spec() {
  ExperimentSpec spec;
  spec.config = SystemConfig::uniform(2, 2, 4, 2.5, 1.0);
  spec.num_realizations = 5;
  spec.seed = 99;
  spec.snr_grid_db = {0.0, 10.0, 20.0};
  spec.strategies = {Strategy::kAlgorithmI, Strategy::kMrt};
  return spec;
}

TEST(RunSweep, SingleMrtRowMatchesDirectEvaluation) {
  ExperimentSpec spec = small_spec();
  spec.num_realizations = 1;
  spec.snr_grid_db = {10.0};
  spec.strategies = {Strategy::kMrt};
  const SweepTable table = run_sweep(spec);
  ASSERT_EQ(table.rows.size(), 1u);
  SystemConfig cfg = spec.config;
  cfg.noise_var.setConstant(noise_for_snr(cfg, 10.0));
  const ChannelSet ch = gen_channels(realization_seed(99, 0), cfg);
  EXPECT_DOUBLE_EQ(table.rows[0].mean_sum_rate, sum_rate(cfg, ch, mrt_baseline(cfg, ch)));
  EXPECT_EQ(table.rows[0].std_sum_rate, 0.0);
}

TEST(RunSweep, RowCountsAndDominance) {
  const SweepTable table = run_sweep(small_spec());
  ASSERT_EQ(table.rows.size(), 6u);
  for (size_t i = 0; i < table.rows.size(); i += 2) {
    EXPECT_EQ(table.rows[i].strategy, Strategy::kAlgorithmI);
    EXPECT_EQ(table.rows[i + 1].strategy, Strategy::kMrt);
    EXPECT_EQ(table.rows[i].snr_db, table.rows[i + 1].snr_db);
    EXPECT_GE(table.rows[i].mean_sum_rate, table.rows[i + 1].mean_sum_rate);
    EXPECT_EQ(table.rows[i].num_scored + table.rows[i].num_failed, 5);
  }
}

TEST(RunSweep, CsvIndependentOfThreadCount) {
  ExperimentSpec spec = small_spec();
  spec.strategies = {Strategy::kAlgorithmI, Strategy::kZf, Strategy::kMrt};
  std::string reference;
  for (int threads : {1, 2, 3}) {
    spec.threads = threads;
    std::ostringstream csv;
    write_sweep_csv(csv, run_sweep(spec));
    if (reference.empty()) {
      reference = csv.str();
    } else {
      EXPECT_EQ(csv.str(), reference) << threads << " threads";
    }
  }
  EXPECT_EQ(reference.substr(0, reference.find('\n')),
            "snr_db,strategy,mean_sum_rate,std_sum_rate,mean_power_1,mean_power_2,mean_power_3,"
            "mean_power_4,frac_switched_off");
}

TEST(ExperimentSpecValidation, RejectsEmptyOrBadFields) {
  ExperimentSpec spec = small_spec();
  spec.snr_grid_db.clear();
  EXPECT_THROW(spec.validate(), InvalidInput);
  spec = small_spec();
  spec.num_realizations = 0;
  EXPECT_THROW(spec.validate(), InvalidInput);
  spec = small_spec();
  spec.snr_grid_db = {std::nan("")};
  EXPECT_THROW(spec.validate(), InvalidInput);
  spec = small_spec();
  spec.strategies.clear();
  EXPECT_THROW(spec.validate(), InvalidInput);
}

}  // namespace
}  // namespace coordbeam
