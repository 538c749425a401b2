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

#include "coordbeam/validation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "coordbeam/algorithm.hpp"
#include "coordbeam/aux_updates.hpp"
#include "coordbeam/oracles.hpp"
#include "coordbeam/precoder_step.hpp"
#include "coordbeam/sim.hpp"

namespace coordbeam::validation {
namespace {

std::string format_vector(const RVector& v) {
  std::ostringstream out;
  out.precision(17);
  out << '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? ", " : "") << v(i);
  out << ']';
  return out.str();
}

double max_rel_diff(const RVector& a, const RVector& b) {
  return ((a - b).array().abs() / b.array().abs().max(1e-300)).maxCoeff();
}

// Records one case; keeps the first failure across all checks of a suite.
void record(SuiteReport& report, CheckSummary& check, int index, std::uint64_t seed,
            double error, const std::string& inputs) {
  ++check.cases;
  check.max_error = std::max(check.max_error, error);
  if (error <= check.tolerance) {
    ++check.passed;
    return;
  }
  if (!report.first_failure) {
    std::ostringstream detail;
    detail.precision(6);
    detail << check.name << ": error " << error << " > tolerance " << check.tolerance;
    report.first_failure = CaseFailure{index, seed, inputs, detail.str()};
  }
}

}  // namespace

SuiteReport run_aux_suite(std::uint64_t seed) {
  SuiteReport report{"aux", seed, {}, {}};
  CheckSummary nu_gp{"update_nu_vs_gp_oracle", 0, 0, 0.0, 1e-6};
  CheckSummary nu_descent{"update_nu_vs_projected_descent", 0, 0, 0.0, 1e-6};
  CheckSummary nu_grid{"update_nu_vs_grid_k2", 0, 0, 0.0, 1e-6};
  CheckSummary tau_eta{"update_tau_eta_vs_golden_section", 0, 0, 0.0, 1e-8};

  const int sizes[] = {2, 3, 4, 8};
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t case_seed = realization_seed(seed, static_cast<std::uint64_t>(i));
    std::mt19937_64 rng(case_seed);
    std::uniform_real_distribution<double> unit(0.01, 1.0);
    const int k = sizes[i % 4];
    RVector beta(k);
    for (int j = 0; j < k; ++j) beta(j) = unit(rng);
    const RVector nu = update_nu(beta);
    const std::string inputs = "beta=" + format_vector(beta);
    record(report, nu_gp, i, case_seed, max_rel_diff(nu, gp_oracle_nu(beta).nu), inputs);
    if (k == 3) {
      record(report, nu_descent, i, case_seed, max_rel_diff(nu, oracle::nu_projected_descent(beta)),
             inputs);
    }
    if (k == 2) {
      record(report, nu_grid, i, case_seed, max_rel_diff(nu, oracle::nu_grid_k2(beta)), inputs);
    }
  }

  for (int i = 0; i < 100; ++i) {
    const std::uint64_t case_seed = realization_seed(seed + 1, static_cast<std::uint64_t>(i));
    std::mt19937_64 rng(case_seed);
    std::uniform_real_distribution<double> range(0.1, 10.0);
    const double c = range(rng);
    const double f = range(rng);
    const double r = range(rng);
    const TauEta closed = update_tau_eta(c, f, r);
    const oracle::TauEtaOracle ref = oracle::tau_eta(c, f, r);
    const double err = std::max(std::abs(closed.tau - ref.tau) / ref.tau,
                                std::abs(closed.eta - ref.eta) / ref.eta);
    RVector cfr(3);
    cfr << c, f, r;
    record(report, tau_eta, i, case_seed, err, "(c,f,r)=" + format_vector(cfr));
  }
  report.checks = {nu_gp, nu_descent, nu_grid, tau_eta};
  return report;
}

SuiteReport run_subproblem_suite(std::uint64_t seed) {
  SuiteReport report{"subproblem", seed, {}, {}};
  CheckSummary objective{"objective_vs_projected_gradient", 0, 0, 0.0, 1e-4};
  CheckSummary kkt{"kkt_residual", 0, 0, 0.0, 1e-8};
  CheckSummary feasibility{"power_feasibility", 0, 0, 0.0, 1e-8};

  const SystemConfig config = SystemConfig::uniform(1, 2, 2, 1.0, 0.1);
  for (int i = 0; i < 20; ++i) {
    const std::uint64_t case_seed = realization_seed(seed, static_cast<std::uint64_t>(i));
    const ChannelSet channels = gen_channels(case_seed, config);
    const PrecoderSet start = oracle::random_feasible_precoders(config, case_seed + 1);
    const AuxState aux = optimal_aux(config, channels, start, NuPolicy::kOptimize, kDefaultFloor);
    const SubproblemSpec spec = build_subproblem(config, channels, aux);
    const SubproblemSolution sol = solve_subproblem(spec);
    const double mine = subproblem_objective(spec, sol.precoders, sol.t);
    const double ref = oracle::subproblem_projected_gradient(spec, 50, case_seed + 2).objective;
    const std::string inputs = "channel_seed=" + std::to_string(case_seed) +
                               " nu=" + format_vector(spec.nu) + " tau=" + format_vector(spec.tau) +
                               " eta=" + format_vector(spec.eta);
    // One-sided: only a solver objective above the oracle's is an error.
    record(report, objective, i, case_seed, std::max(0.0, (mine - ref) / std::abs(ref)), inputs);
    record(report, kkt, i, case_seed, sol.diagnostics.kkt_residual, inputs);
    record(report, feasibility, i, case_seed,
           std::max(0.0, check_feasible(config, sol.precoders, 0.0).max_violation), inputs);
  }
  report.checks = {objective, kkt, feasibility};
  return report;
}

SuiteReport run_endtoend_suite(std::uint64_t seed) {
  SuiteReport report{"endtoend", seed, {}, {}};
  CheckSummary monotone{"trace_monotone", 0, 0, 0.0, 1e-9};
  CheckSummary feasibility{"iterate_feasibility", 0, 0, 0.0, 1e-8};
  CheckSummary exact{"subproblems_exact", 0, 0, 0.0, 0.0};

  const SystemConfig config = SystemConfig::uniform(2, 2, 4, 2.0, 0.1);
  for (int i = 0; i < 50; ++i) {
    const std::uint64_t case_seed = realization_seed(seed, static_cast<std::uint64_t>(i));
    const ChannelSet channels = gen_channels(case_seed, config);
    const SolveResult result = run(config, channels);
    double worst_rise = 0.0;
    double worst_violation = 0.0;
    for (size_t j = 0; j < result.trace.size(); ++j) {
      if (j > 0) {
        worst_rise =
            std::max(worst_rise, result.trace[j].objective - result.trace[j - 1].objective);
      }
      worst_violation = std::max(worst_violation, result.trace[j].max_power_violation);
    }
    const std::string inputs = "channel_seed=" + std::to_string(case_seed) +
                               " status=" + to_string(result.status);
    record(report, monotone, i, case_seed, worst_rise, inputs);
    record(report, feasibility, i, case_seed, worst_violation, inputs);
    record(report, exact, i, case_seed,
           result.status == SolveStatus::kSubproblemInexact ? 1.0 : 0.0, inputs);
  }
  report.checks = {monotone, feasibility, exact};
  return report;
}

SuiteReport run_suite(std::string_view name, std::uint64_t seed) {
  if (name == "aux") return run_aux_suite(seed);
  if (name == "subproblem") return run_subproblem_suite(seed);
  if (name == "endtoend") return run_endtoend_suite(seed);
  throw std::invalid_argument("unknown validation suite '" + std::string(name) + "'");
}

}  // namespace coordbeam::validation
