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

#include "coordbeam/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace coordbeam::io {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// Field-level access with diagnostics that name the full path.
class Fields {
 public:
  Fields(const json& node, std::string path, std::string source)
      : node_(node), path_(std::move(path)), source_(std::move(source)) {
    if (!node_.is_object()) fail("", "expected an object");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    std::string where = path_;
    if (!key.empty()) where += (where.empty() ? "" : ".") + key;
    throw ConfigError(source_ + ": field '" + where + "': " + what);
  }

  void allow_only(std::initializer_list<const char*> keys) const {
    for (const auto& [key, value] : node_.items()) {
      if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
        fail(key, "unknown field");
      }
    }
  }

  bool has(const std::string& key) const { return node_.contains(key); }
  const json& raw(const std::string& key) const { return node_.at(key); }
  std::string child_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  const std::string& source() const { return source_; }

  double number(const std::string& key) const {
    const json& v = require(key);
    if (!v.is_number()) fail(key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(key, "expected a finite number");
    return d;
  }

  double positive(const std::string& key) const {
    const double d = number(key);
    if (!(d > 0.0)) fail(key, "expected a positive number");
    return d;
  }

  long long integer(const std::string& key, long long min_value) const {
    const json& v = require(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    const long long i = v.get<long long>();
    if (i < min_value) fail(key, "expected an integer >= " + std::to_string(min_value));
    return i;
  }

  std::uint64_t unsigned_integer(const std::string& key) const {
    const json& v = require(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                   v.get<long long>() < 0)) {
      fail(key, "expected a nonnegative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::string string(const std::string& key) const {
    const json& v = require(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  // A scalar broadcast to `length`, or an array of exactly that length.
  RVector vector_or_scalar(const std::string& key, int length) const {
    const json& v = require(key);
    if (v.is_number()) return RVector::Constant(length, number(key));
    return vector(key, length);
  }

  RVector vector(const std::string& key, int length) const {
    const json& v = require(key);
    if (!v.is_array()) fail(key, "expected an array of numbers");
    if (length >= 0 && static_cast<int>(v.size()) != length) {
      fail(key, "expected " + std::to_string(length) + " entries, got " +
                    std::to_string(v.size()));
    }
    RVector out(static_cast<Eigen::Index>(v.size()));
    for (size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) fail(key + "[" + std::to_string(i) + "]", "expected a number");
      out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
    }
    return out;
  }

 private:
  const json& require(const std::string& key) const {
    if (!node_.contains(key)) fail(key, "missing");
    return node_.at(key);
  }

  const json& node_;
  std::string path_;
  std::string source_;
};

json parse_document(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const size_t byte = e.byte == 0 ? 0 : std::min<size_t>(e.byte - 1, text.size());
    int line = 1;
    int column = 1;
    for (size_t i = 0; i < byte; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError(source + ": syntax error at line " + std::to_string(line) + ", column " +
                      std::to_string(column) + ": " + e.what());
  }
}

SystemConfig parse_system(const json& node, const std::string& source,
                          const std::string& path = "system") {
  Fields f(node, path, source);
  f.allow_only({"L", "antennas_per_bs", "K", "antenna_power", "total_power", "power_groups",
                "noise_var"});
  SystemConfig config;
  const int num_bs = static_cast<int>(f.integer("L", 1));
  const json& per_bs = f.raw("antennas_per_bs");
  if (per_bs.is_number_integer()) {
    const int n = static_cast<int>(f.integer("antennas_per_bs", 1));
    config.antennas_per_bs.assign(static_cast<size_t>(num_bs), n);
  } else {
    const RVector v = f.vector("antennas_per_bs", num_bs);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (v(i) < 1 || v(i) != std::floor(v(i))) {
        f.fail("antennas_per_bs[" + std::to_string(i) + "]", "expected a positive integer");
      }
      config.antennas_per_bs.push_back(static_cast<int>(v(i)));
    }
  }
  config.num_users = static_cast<int>(f.integer("K", 1));
  const int n_ant = config.num_antennas();

  const int styles = int(f.has("antenna_power")) + int(f.has("total_power")) +
                     int(f.has("power_groups"));
  if (styles != 1) {
    f.fail("", "exactly one of antenna_power, total_power, power_groups is required");
  }
  if (f.has("antenna_power")) {
    config.antenna_power = f.vector_or_scalar("antenna_power", n_ant);
  } else if (f.has("total_power")) {
    const double total = f.number("total_power");
    PowerGroup all;
    for (int n = 0; n < n_ant; ++n) all.antennas.push_back(n);
    all.budget = total;
    config.power_groups.push_back(all);
  } else {
    const json& groups = f.raw("power_groups");
    if (!groups.is_array() || groups.empty()) f.fail("power_groups", "expected a non-empty array");
    for (size_t i = 0; i < groups.size(); ++i) {
      Fields g(groups[i], f.child_path("power_groups") + "[" + std::to_string(i) + "]", source);
      g.allow_only({"antennas", "budget"});
      PowerGroup group;
      const RVector idx = g.vector("antennas", -1);
      for (Eigen::Index j = 0; j < idx.size(); ++j) {
        if (idx(j) < 0 || idx(j) != std::floor(idx(j))) {
          g.fail("antennas[" + std::to_string(j) + "]", "expected a nonnegative integer");
        }
        group.antennas.push_back(static_cast<int>(idx(j)));
      }
      group.budget = g.number("budget");
      config.power_groups.push_back(group);
    }
  }
  if (!config.power_groups.empty()) {
    // Per-antenna budgets are informational here: an even share of the group.
    config.antenna_power = RVector::Zero(n_ant);
    for (const auto& g : config.power_groups) {
      for (int n : g.antennas) {
        if (n >= 0 && n < n_ant) config.antenna_power(n) = g.budget / g.antennas.size();
      }
    }
  }
  config.noise_var = f.has("noise_var") ? f.vector_or_scalar("noise_var", config.num_users)
                                        : RVector::Ones(config.num_users);
  return config;
}

void validate_system(const SystemConfig& config, const std::string& source,
                     const std::string& path) {
  try {
    config.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(source + ": field '" + path + "': " + e.what());
  }
}

ordered_json complex_array(const std::vector<CVector>& vectors) {
  ordered_json out = ordered_json::array();
  for (const auto& v : vectors) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index n = 0; n < v.size(); ++n) row.push_back({v(n).real(), v(n).imag()});
    out.push_back(row);
  }
  return out;
}

std::vector<CVector> parse_complex_array(const json& node, int rows, int cols,
                                         const std::string& source, const std::string& path) {
  auto fail = [&](const std::string& where, const std::string& what) {
    throw ConfigError(source + ": field '" + where + "': " + what);
  };
  if (!node.is_array() || static_cast<int>(node.size()) != rows) {
    fail(path, "expected an array of " + std::to_string(rows) + " vectors");
  }
  std::vector<CVector> out;
  for (int k = 0; k < rows; ++k) {
    const json& row = node[static_cast<size_t>(k)];
    const std::string row_path = path + "[" + std::to_string(k) + "]";
    if (!row.is_array() || static_cast<int>(row.size()) != cols) {
      fail(row_path, "expected " + std::to_string(cols) + " [re, im] entries");
    }
    CVector v(cols);
    for (int n = 0; n < cols; ++n) {
      const json& e = row[static_cast<size_t>(n)];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        fail(row_path + "[" + std::to_string(n) + "]", "expected [re, im]");
      }
      v(n) = Complex(e[0].get<double>(), e[1].get<double>());
    }
    if (!v.allFinite()) fail(row_path, "entries must be finite");
    out.push_back(v);
  }
  return out;
}

ordered_json vector_json(const RVector& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

ordered_json system_json(const SystemConfig& config) {
  ordered_json s;
  s["L"] = config.num_bs();
  s["antennas_per_bs"] = config.antennas_per_bs;
  s["K"] = config.num_users;
  if (config.power_groups.empty()) {
    s["antenna_power"] = vector_json(config.antenna_power);
  } else {
    ordered_json groups = ordered_json::array();
    for (const auto& g : config.power_groups) {
      groups.push_back({{"antennas", g.antennas}, {"budget", g.budget}});
    }
    s["power_groups"] = groups;
  }
  s["noise_var"] = vector_json(config.noise_var);
  return s;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::string& source) {
  const json doc = parse_document(text, source);
  Fields top(doc, "", source);
  top.allow_only({"system", "solver", "objective", "experiment", "output"});
  if (!top.has("system")) top.fail("system", "missing");

  RunConfig rc;
  rc.system = parse_system(doc.at("system"), source);

  if (top.has("solver")) {
    Fields f(doc.at("solver"), "solver", source);
    f.allow_only({"max_outer_iters", "rel_obj_tol", "floors", "subproblem_tol",
                  "subproblem_max_iters", "init"});
    if (f.has("max_outer_iters")) rc.solver.max_outer_iters = static_cast<int>(f.integer("max_outer_iters", 1));
    if (f.has("rel_obj_tol")) rc.solver.rel_obj_tol = f.positive("rel_obj_tol");
    if (f.has("floors")) rc.solver.floor = f.positive("floors");
    if (f.has("subproblem_tol")) rc.solver.subproblem_tol = f.positive("subproblem_tol");
    if (f.has("subproblem_max_iters")) {
      rc.solver.subproblem_max_iters = static_cast<int>(f.integer("subproblem_max_iters", 1));
    }
    if (f.has("init")) {
      const std::string init = f.string("init");
      if (init == "per_antenna") {
        rc.solver.init = InitMode::kPerAntenna;
      } else if (init == "global_scale") {
        rc.solver.init = InitMode::kGlobalScale;
      } else {
        f.fail("init", "expected \"per_antenna\" or \"global_scale\"");
      }
    }
  }

  if (top.has("objective")) {
    Fields f(doc.at("objective"), "objective", source);
    f.allow_only({"kind", "weights"});
    if (f.has("kind")) {
      const std::string kind = f.string("kind");
      if (kind == "sum_rate") {
        rc.solver.objective = ObjectiveKind::kSumRate;
      } else if (kind == "weighted_mse") {
        rc.solver.objective = ObjectiveKind::kWeightedMse;
      } else {
        f.fail("kind", "expected \"sum_rate\" or \"weighted_mse\"");
      }
    }
    if (f.has("weights")) rc.system.mse_weights = f.vector("weights", rc.system.num_users);
  }

  if (top.has("experiment")) {
    Fields f(doc.at("experiment"), "experiment", source);
    f.allow_only({"seed", "realizations", "snr_grid_db", "strategies"});
    if (f.has("seed")) rc.experiment.seed = f.unsigned_integer("seed");
    if (f.has("realizations")) rc.experiment.realizations = static_cast<int>(f.integer("realizations", 1));
    if (f.has("snr_grid_db")) {
      const RVector grid = f.vector("snr_grid_db", -1);
      if (!grid.allFinite()) f.fail("snr_grid_db", "entries must be finite");
      rc.experiment.snr_grid_db.assign(grid.data(), grid.data() + grid.size());
    }
    if (f.has("strategies")) {
      const json& list = f.raw("strategies");
      if (!list.is_array()) f.fail("strategies", "expected an array of strategy names");
      for (size_t i = 0; i < list.size(); ++i) {
        const std::string key = "strategies[" + std::to_string(i) + "]";
        if (!list[i].is_string()) f.fail(key, "expected a string");
        try {
          rc.experiment.strategies.push_back(parse_strategy(list[i].get<std::string>()));
        } catch (const InvalidInput& e) {
          f.fail(key, e.what());
        }
      }
    }
  }

  if (top.has("output")) {
    Fields f(doc.at("output"), "output", source);
    f.allow_only({"path", "format"});
    if (f.has("path")) rc.output.path = f.string("path");
    if (f.has("format")) {
      rc.output.format = f.string("format");
      if (rc.output.format != "json" && rc.output.format != "csv") {
        f.fail("format", "expected \"json\" or \"csv\"");
      }
    }
  }

  validate_system(rc.system, source, "system");
  try {
    rc.solver.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(source + ": field 'solver': " + e.what());
  }
  return rc;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << contents;
  if (!out) throw std::runtime_error(path + ": write failed");
}

RunConfig load_run_config(const std::string& path) { return parse_run_config(read_file(path), path); }

ChannelSet load_channels(const std::string& path, const SystemConfig& config) {
  const json doc = parse_document(read_file(path), path);
  if (!doc.is_object() || !doc.contains("channels")) {
    throw ConfigError(path + ": field 'channels': missing");
  }
  ChannelSet channels;
  channels.h = parse_complex_array(doc.at("channels"), config.num_users, config.num_antennas(),
                                   path, "channels");
  return channels;
}

std::string result_json(const SystemConfig& config, const ChannelSet& channels,
                        const SolveOptions& options, const SolveResult& result,
                        const ResultContext& context) {
  ordered_json doc;
  doc["status"] = to_string(result.status);
  doc["iterations"] = result.iterations;
  doc["sum_rate"] = result.sum_rate;
  doc["weighted_mse"] = result.weighted_mse;
  doc["seed"] = context.seed;
  doc["channel_generator"] = std::string(kChannelGenerator);
  doc["channel_source"] = context.channel_source;
  doc["system"] = system_json(config);
  ordered_json objective;
  objective["kind"] = to_string(options.objective);
  if (config.mse_weights) objective["weights"] = vector_json(*config.mse_weights);
  doc["objective"] = objective;
  doc["solver"] = {{"max_outer_iters", options.max_outer_iters},
                   {"rel_obj_tol", options.rel_obj_tol},
                   {"floors", options.floor},
                   {"subproblem_tol", options.subproblem_tol},
                   {"subproblem_max_iters", options.subproblem_max_iters},
                   {"init", options.init == InitMode::kPerAntenna ? "per_antenna" : "global_scale"}};
  doc["channels"] = complex_array(channels.h);
  doc["precoders"] = complex_array(result.precoders.b);
  ordered_json metrics;
  metrics["sinr"] = vector_json(result.metrics.sinr);
  metrics["rate"] = vector_json(result.metrics.rate);
  metrics["mmse"] = vector_json(result.metrics.mmse);
  metrics["antenna_power"] = vector_json(result.antenna_power);
  metrics["sum_rate"] = result.sum_rate;
  metrics["weighted_mse"] = result.weighted_mse;
  doc["metrics"] = metrics;
  doc["switched_off"] = result.switched_off;
  ordered_json trace = ordered_json::array();
  for (const auto& rec : result.trace) {
    ordered_json row;
    row["iteration"] = rec.iteration;
    row["objective_after_aux"] = rec.objective_after_aux;
    row["objective"] = rec.objective;
    row["sum_rate"] = rec.sum_rate;
    row["weighted_mse"] = rec.weighted_mse;
    row["max_power_violation"] = rec.max_power_violation;
    row["subproblem_iterations"] = rec.subproblem_iterations;
    row["subproblem_kkt"] = rec.subproblem_kkt;
    trace.push_back(row);
  }
  doc["trace"] = trace;
  return doc.dump(2) + "\n";
}

void write_power_profile_csv(std::ostream& out, const SystemConfig& config,
                             const RVector& antenna_power) {
  const RVector budgets = config.group_budget_per_antenna();
  const RVector shares = config.antenna_power;
  out << "antenna,bs,power,budget,utilization\n";
  int antenna = 0;
  for (int bs = 0; bs < config.num_bs(); ++bs) {
    for (int j = 0; j < config.antennas_per_bs[static_cast<size_t>(bs)]; ++j, ++antenna) {
      // Utilization against the antenna's own budget, or its even share of a group budget.
      const double budget = config.power_groups.empty() ? budgets(antenna) : shares(antenna);
      const double util = budget > 0.0 ? antenna_power(antenna) / budget : 0.0;
      out << antenna + 1 << ',' << bs + 1 << ',' << format_number(antenna_power(antenna)) << ','
          << format_number(budget) << ',' << format_number(util) << '\n';
    }
  }
}

std::string sweep_json(const SweepTable& table, const ExperimentSpec& spec) {
  ordered_json doc;
  doc["seed"] = spec.seed;
  doc["realizations"] = spec.num_realizations;
  doc["channel_generator"] = std::string(kChannelGenerator);
  doc["include_capped_runs"] = spec.include_capped_runs;
  ordered_json rows = ordered_json::array();
  for (const auto& r : table.rows) {
    ordered_json row;
    row["snr_db"] = r.snr_db;
    row["strategy"] = to_string(r.strategy);
    row["mean_sum_rate"] = r.mean_sum_rate;
    row["std_sum_rate"] = r.std_sum_rate;
    row["mean_power"] = vector_json(r.mean_power);
    row["frac_switched_off"] = r.frac_switched_off;
    row["num_scored"] = r.num_scored;
    row["num_failed"] = r.num_failed;
    row["num_capped"] = r.num_capped;
    rows.push_back(row);
  }
  doc["rows"] = rows;
  return doc.dump(2) + "\n";
}

std::string validation_json(const std::vector<validation::SuiteReport>& reports) {
  ordered_json doc;
  bool all_ok = true;
  ordered_json suites = ordered_json::array();
  for (const auto& rep : reports) {
    all_ok = all_ok && rep.ok();
    ordered_json s;
    s["suite"] = rep.suite;
    s["seed"] = rep.seed;
    s["passed"] = rep.ok();
    ordered_json checks = ordered_json::array();
    for (const auto& c : rep.checks) {
      checks.push_back({{"name", c.name},
                        {"cases", c.cases},
                        {"passed", c.passed},
                        {"max_error", c.max_error},
                        {"tolerance", c.tolerance}});
    }
    s["checks"] = checks;
    if (rep.first_failure) {
      const auto& f = *rep.first_failure;
      s["first_failure"] = {{"case", f.case_index},
                            {"seed", f.seed},
                            {"inputs", f.inputs},
                            {"detail", f.detail}};
    } else {
      s["first_failure"] = nullptr;
    }
    suites.push_back(s);
  }
  doc["passed"] = all_ok;
  doc["suites"] = suites;
  return doc.dump(2) + "\n";
}

RecheckReport recheck_result(const std::string& text, double tolerance) {
  const std::string source = "<result>";
  const json doc = parse_document(text, source);
  Fields top(doc, "", source);
  for (const char* key : {"system", "channels", "precoders", "metrics"}) {
    if (!top.has(key)) top.fail(key, "missing");
  }
  SystemConfig config = parse_system(doc.at("system"), source);
  if (doc.contains("objective") && doc.at("objective").contains("weights")) {
    Fields obj(doc.at("objective"), "objective", source);
    config.mse_weights = obj.vector("weights", config.num_users);
  }
  validate_system(config, source, "system");
  ChannelSet channels;
  channels.h = parse_complex_array(doc.at("channels"), config.num_users, config.num_antennas(),
                                   source, "channels");
  PrecoderSet precoders;
  precoders.b = parse_complex_array(doc.at("precoders"), config.num_users,
                                    config.num_antennas(), source, "precoders");

  const LinkMetrics m = link_metrics(config, channels, precoders);
  Fields stored(doc.at("metrics"), "metrics", source);
  RecheckReport report;
  auto compare = [&](const std::string& field, const RVector& fresh, const RVector& kept) {
    for (Eigen::Index i = 0; i < fresh.size(); ++i) {
      const double err = std::abs(fresh(i) - kept(i)) / std::max(1.0, std::abs(kept(i)));
      if (err > report.max_error) report.max_error = err;
      if (err > tolerance && report.ok) {
        report.ok = false;
        report.field = "metrics." + field + "[" + std::to_string(i) + "]";
      }
    }
  };
  compare("sinr", m.sinr, stored.vector("sinr", config.num_users));
  compare("rate", m.rate, stored.vector("rate", config.num_users));
  compare("mmse", m.mmse, stored.vector("mmse", config.num_users));
  compare("antenna_power", per_antenna_power(precoders),
          stored.vector("antenna_power", config.num_antennas()));
  compare("sum_rate", RVector::Constant(1, m.rate.sum()),
          RVector::Constant(1, stored.number("sum_rate")));
  compare("weighted_mse", RVector::Constant(1, config.weights().dot(m.mmse)),
          RVector::Constant(1, stored.number("weighted_mse")));
  return report;
}

}  // namespace coordbeam::io
