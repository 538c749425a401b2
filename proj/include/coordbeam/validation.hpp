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

// Oracle cross-check suites behind `coordbeam validate`.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace coordbeam::validation {

struct CaseFailure {
  int case_index = 0;
  std::uint64_t seed = 0;
  /// Inputs needed to reproduce the case, printed with full precision.
  std::string inputs;
  std::string detail;
};

struct CheckSummary {
  std::string name;
  int cases = 0;
  int passed = 0;
  double max_error = 0.0;
  double tolerance = 0.0;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<CheckSummary> checks;
  std::optional<CaseFailure> first_failure;

  bool ok() const { return !first_failure.has_value(); }
};

/// update_nu against the log-domain Newton and projected-descent oracles on
/// 100 random beta vectors; update_tau_eta against golden-section search
/// on 100 random (c, f, r).
SuiteReport run_aux_suite(std::uint64_t seed = 1);

/// 20 random K=2, N=2 subproblems against a 50-restart projected-gradient
/// oracle; KKT residual and feasibility of every solution.
SuiteReport run_subproblem_suite(std::uint64_t seed = 1);

/// Monotone relaxed-objective traces and feasible iterates over 50 seeds
/// of the 2-BS, 2-antenna, 4-user setup.
SuiteReport run_endtoend_suite(std::uint64_t seed = 1);

inline constexpr std::string_view kSuiteNames[] = {"aux", "subproblem", "endtoend"};

/// Dispatches on the suite name; throws std::invalid_argument when unknown.
SuiteReport run_suite(std::string_view name, std::uint64_t seed = 1);

}  // namespace coordbeam::validation
