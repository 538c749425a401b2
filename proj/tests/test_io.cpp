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

#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "coordbeam/io.hpp"

namespace coordbeam {
namespace {

const char* kTwoCellConfig = R"({
  "system": {"L": 2, "antennas_per_bs": 2, "K": 4, "antenna_power": 2.0, "noise_var": 0.1},
  "solver": {"max_outer_iters": 50, "rel_obj_tol": 1e-7, "floors": 1e-6, "subproblem_tol": 1e-8},
  "objective": {"kind": "sum_rate"},
  "experiment": {"seed": 5, "realizations": 10, "snr_grid_db": [0, 10],
                 "strategies": ["algorithm_I", "mrt"]},
  "output": {"path": "out.json", "format": "json"}
})";

std::string error_of(const std::string& text) {
  try {
    io::parse_run_config(text, "cfg.json");
  } catch (const io::ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(RunConfig, ParsesAllSections) {
  const io::RunConfig rc = io::parse_run_config(kTwoCellConfig);
  EXPECT_EQ(rc.system.num_bs(), 2);
  EXPECT_EQ(rc.system.num_antennas(), 4);
  EXPECT_EQ(rc.system.num_users, 4);
  EXPECT_EQ(rc.system.antenna_power, RVector::Constant(4, 2.0));
  EXPECT_EQ(rc.system.noise_var, RVector::Constant(4, 0.1));
  EXPECT_EQ(rc.solver.max_outer_iters, 50);
  EXPECT_EQ(rc.solver.rel_obj_tol, 1e-7);
  EXPECT_EQ(rc.experiment.seed, 5u);
  EXPECT_EQ(rc.experiment.realizations, 10);
  EXPECT_EQ(rc.experiment.snr_grid_db, (std::vector<double>{0.0, 10.0}));
  EXPECT_EQ(rc.experiment.strategies, (std::vector<Strategy>{Strategy::kAlgorithmI, Strategy::kMrt}));
  EXPECT_EQ(rc.output.path, "out.json");
  EXPECT_EQ(rc.output.format, "json");
}

TEST(RunConfig, PowerStyles) {
  io::RunConfig rc = io::parse_run_config(
      R"({"system": {"L": 1, "antennas_per_bs": [3], "K": 2, "total_power": 6, "noise_var": [1, 2]}})");
  ASSERT_EQ(rc.system.power_groups.size(), 1u);
  EXPECT_EQ(rc.system.power_groups[0].antennas, (std::vector<int>{0, 1, 2}));
  EXPECT_DOUBLE_EQ(rc.system.total_power(), 6.0);
  EXPECT_EQ(rc.system.noise_var(1), 2.0);

  rc = io::parse_run_config(
      R"({"system": {"L": 2, "antennas_per_bs": 1, "K": 1,
           "power_groups": [{"antennas": [0], "budget": 1}, {"antennas": [1], "budget": 3}]}})");
  EXPECT_EQ(rc.system.power_groups.size(), 2u);
  EXPECT_DOUBLE_EQ(rc.system.total_power(), 4.0);

  rc = io::parse_run_config(
      R"({"system": {"L": 1, "antennas_per_bs": 2, "K": 1, "antenna_power": [1, 0]},
          "objective": {"kind": "weighted_mse", "weights": [3]}})");
  EXPECT_EQ(rc.solver.objective, ObjectiveKind::kWeightedMse);
  EXPECT_EQ((*rc.system.mse_weights)(0), 3.0);
}

TEST(RunConfig, SyntaxErrorNamesLineAndColumn) {
  const std::string msg = error_of("{\n  \"system\": {\n    \"L\": 2,,\n  }\n}");
  EXPECT_NE(msg.find("cfg.json"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("column"), std::string::npos) << msg;
}

TEST(RunConfig, FieldErrorsNameTheField) {
  EXPECT_NE(error_of(R"({"system": {"L": 1, "antennas_per_bs": 2, "K": -1, "antenna_power": 1}})")
                .find("system.K"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"system": {"L": 1, "antennas_per_bs": 2, "K": 1, "antenna_power": [1, 2, 3]}})")
                .find("system.antenna_power"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"system": {"L": 1, "antennas_per_bs": 2, "K": 1, "antenna_power": 1,
                        "total_power": 2}})")
                .find("exactly one"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"system": {"L": 1, "antennas_per_bs": 2, "K": 1, "antenna_power": 1,
                        "colour": 2}})")
                .find("system.colour"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"system": {"L": 1, "antennas_per_bs": 2, "K": 1, "antenna_power": 1},
                        "solver": {"rel_obj_tol": "tight"}})")
                .find("solver.rel_obj_tol"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"system": {"L": 1, "antennas_per_bs": 2, "K": 1, "antenna_power": 1},
                        "experiment": {"strategies": ["dpc"]}})")
                .find("experiment.strategies[0]"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"system": {"L": 1, "antennas_per_bs": 2, "K": 1, "antenna_power": 0}})")
                .find("system"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"solver": {}})").find("system"), std::string::npos);
}

struct Solved {
  SystemConfig config;
  ChannelSet channels;
  SolveOptions options;
  SolveResult result;
};

Solved solve_small() {
  Solved s;
  s.config = SystemConfig::uniform(2, 2, 3, 2.0, 0.1);
  s.channels = gen_channels(17, s.config);
  s.result = run(s.config, s.channels, s.options);
  return s;
}

TEST(ResultJson, RecheckAcceptsFreshResult) {
  const Solved s = solve_small();
  const std::string doc = io::result_json(s.config, s.channels, s.options, s.result, {17, "generated"});
  const io::RecheckReport rep = io::recheck_result(doc);
  EXPECT_TRUE(rep.ok) << rep.field;
  EXPECT_LE(rep.max_error, 1e-12);
  EXPECT_NE(doc.find("\"precoders\""), std::string::npos);
  EXPECT_NE(doc.find("\"trace\""), std::string::npos);
  EXPECT_EQ(doc, io::result_json(s.config, s.channels, s.options, s.result, {17, "generated"}));
}

TEST(ResultJson, RecheckDetectsTamperedMetric) {
  const Solved s = solve_small();
  SolveResult tampered = s.result;
  tampered.metrics.rate(1) += 1e-6;
  const io::RecheckReport rep = io::recheck_result(
      io::result_json(s.config, s.channels, s.options, tampered, {17, "generated"}));
  EXPECT_FALSE(rep.ok);
  EXPECT_EQ(rep.field, "metrics.rate[1]");
}

TEST(PowerProfile, OneRowPerAntenna) {
  const SystemConfig cfg = SystemConfig::uniform(2, 2, 1, 2.0, 0.1);
  RVector p(4);
  p << 2.0, 1.0, 2.0, 0.5;
  std::ostringstream out;
  io::write_power_profile_csv(out, cfg, p);
  EXPECT_EQ(out.str(),
            "antenna,bs,power,budget,utilization\n"
            "1,1,2,2,1\n"
            "2,1,1,2,0.5\n"
            "3,2,2,2,1\n"
            "4,2,0.5,2,0.25\n");
}

TEST(ValidationJson, ReportsFirstFailure) {
  validation::SuiteReport ok{"aux", 1, {{"check", 3, 3, 1e-12, 1e-8}}, {}};
  validation::SuiteReport bad{"subproblem", 2, {{"check", 3, 2, 1.0, 1e-8}},
                              validation::CaseFailure{1, 77, "x=[1]", "too large"}};
  const std::string doc = io::validation_json({ok, bad});
  EXPECT_NE(doc.find("\"passed\": false"), std::string::npos);
  EXPECT_NE(doc.find("\"seed\": 77"), std::string::npos);
  EXPECT_NE(doc.find("\"inputs\": \"x=[1]\""), std::string::npos);
}

}  // namespace
}  // namespace coordbeam
