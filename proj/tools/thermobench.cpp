// Copyright 2026 The qthermo Authors
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

// thermobench: temperature sweeps, single-point optima, thermal reference
// curves and the property suite.
//
// Exit codes: 0 success, 1 configuration error, 2 verification or invariant
// failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qthermo/qthermo.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitFailure = 2;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<qthermo::ProblemKind> parse_scenarios(const std::vector<std::string>& names) {
  std::vector<qthermo::ProblemKind> out;
  for (const std::string& n : names) {
    if (n == "all") {
      for (auto k : {qthermo::ProblemKind::cptp, qthermo::ProblemKind::ncptp1, qthermo::ProblemKind::ncptp2,
                     qthermo::ProblemKind::ncptp2_bound})
        out.push_back(k);
    } else {
      out.push_back(qthermo::parse_problem_kind(n));
    }
  }
  return out;
}

qthermo::SweepConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return qthermo::sweep_config_from_json(j);
}

// Flag values, applied over the config file only when given.
struct SweepFlags {
  std::string config;
  std::vector<std::string> scenarios;
  std::string family;
  double t_min = 0, t_max = 0, t_step = 0, h = 0;
  std::size_t states = 0, bound_runs = 0, workers = 0;
  std::uint64_t seed = 0;
  std::size_t restarts = 0, budget = 0;
  std::size_t cloud_restarts = 0, cloud_budget = 0, bound_restarts = 0, bound_budget = 0;
  bool coarse = false;
  std::string format = "csv";
  std::string out = "-";
};

int run_sweep_command(const SweepFlags& f, const CLI::App& cmd) {
  auto given = [&](const char* name) { return cmd.count(name) > 0; };
  qthermo::SweepConfig c = f.config.empty() ? qthermo::SweepConfig{} : load_config(f.config);
  if (given("--scenario")) c.scenarios = parse_scenarios(f.scenarios);
  if (given("--unitary-family")) c.family = qthermo::parse_unitary_family(f.family);
  if (given("--t-min")) c.t_min = f.t_min;
  if (given("--t-max")) c.t_max = f.t_max;
  if (given("--t-step")) c.t_step = f.t_step;
  if (f.coarse) c.t_step = (c.t_max - c.t_min) / 10.0;
  if (given("--h")) c.h = f.h;
  if (given("--states")) c.n_states = f.states;
  if (given("--bound-runs")) c.n_bound_runs = f.bound_runs;
  if (given("--seed")) c.master_seed = f.seed;
  if (given("--restarts")) c.point_budget.restarts = f.restarts;
  if (given("--budget")) c.point_budget.evaluations = f.budget;
  if (given("--cloud-restarts")) c.cloud_budget.restarts = f.cloud_restarts;
  if (given("--cloud-budget")) c.cloud_budget.evaluations = f.cloud_budget;
  if (given("--bound-restarts")) c.bound_budget.restarts = f.bound_restarts;
  if (given("--bound-budget")) c.bound_budget.evaluations = f.bound_budget;
  if (given("--workers")) c.workers = f.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : f.workers;
  const auto format = qthermo::parse_output_format(f.format);
  qthermo::validate(c);

  std::vector<qthermo::SweepRecord> records;
  try {
    records = qthermo::run_sweep(c);
  } catch (const qthermo::SweepError& e) {
    std::cerr << "thermobench: " << e.what() << '\n';
    return kExitFailure;
  }
  qthermo::emit_results(records, format, f.out, qthermo::SweepMetadata{c});
  return 0;
}

struct QfiFlags {
  std::string scenario = "cptp";
  std::string family = "general";
  double t = 1.0;
  double h = 0.001;
  std::uint64_t seed = 2026;
  std::size_t restarts = 50, budget = 5000;
  std::string format = "csv";
  std::string out = "-";
};

int run_qfi_command(const QfiFlags& f) {
  const qthermo::ProblemKind kind = qthermo::parse_problem_kind(f.scenario);
  const qthermo::UnitaryFamily family = qthermo::parse_unitary_family(f.family);
  const auto format = qthermo::parse_output_format(f.format);
  if (f.restarts < 1 || f.budget < 1) throw std::invalid_argument("restarts and budget must be positive");
  qthermo::ScenarioOptions so;
  so.stencil.h = f.h;
  qthermo::validate(so.stencil, f.t);

  qthermo::OptimizerOptions oo;
  oo.seed = qthermo::derive_seed(f.seed, {1});
  oo.restarts = f.restarts;
  oo.budget = f.budget;
  std::optional<std::size_t> index;
  if (kind == qthermo::ProblemKind::ncptp2) {
    so.state = qthermo::sample_constrained_state(qthermo::derive_seed(f.seed, {0}), f.t, f.h).params;
    index = 0;
    if (qthermo::is_fixed(family)) {
      oo.start = qthermo::encode_state(*so.state);
    }
  }
  const auto res = qthermo::optimize(qthermo::scenario_problem(kind, family, f.t, so), oo);
  if (!(res.best_value > 0.0)) {
    std::cerr << "thermobench: no feasible optimum found at T = " << f.t << ", scenario = " << f.scenario
              << ", seed = " << f.seed << '\n';
    return kExitFailure;
  }
  qthermo::SweepRecord r;
  r.temperature = f.t;
  r.scenario = std::string(qthermo::to_string(kind));
  r.unitary_family = std::string(qthermo::to_string(family));
  r.state_index = index;
  r.optimal_qfi = res.best_value;
  r.thermal_qfi_reference = qthermo::qfi_thermal_closed_form(f.t);
  r.cramer_rao_bound = qthermo::cramer_rao_bound(res.best_value);
  r.seed = f.seed;
  r.restarts = res.restarts_used;
  r.evaluations = res.evaluations;
  qthermo::SweepConfig meta;
  meta.t_min = meta.t_max = f.t;
  meta.scenarios = {kind};
  meta.family = family;
  meta.master_seed = f.seed;
  meta.h = f.h;
  meta.point_budget = {f.restarts, f.budget};
  qthermo::emit_results({r}, format, f.out, qthermo::SweepMetadata{meta});
  return 0;
}

struct ThermalFlags {
  double t_min = 1.0, t_max = 2.0, t_step = 0.01;
  std::string format = "csv";
  std::string out = "-";
};

int run_thermal_command(const ThermalFlags& f) {
  qthermo::SweepConfig grid_cfg;
  grid_cfg.t_min = f.t_min;
  grid_cfg.t_max = f.t_max;
  grid_cfg.t_step = f.t_step;
  if (!(f.t_min > 0.0)) throw std::invalid_argument("t_min must be positive");
  if (!(f.t_step > 0.0) || !(f.t_min <= f.t_max)) throw std::invalid_argument("bad temperature grid");
  const auto format = qthermo::parse_output_format(f.format);

  std::string text;
  if (format == qthermo::OutputFormat::csv) {
    text = "temperature,thermal_qfi,cramer_rao_bound\n";
    for (double t : qthermo::temperature_grid(grid_cfg)) {
      const double fq = qthermo::qfi_thermal_closed_form(t);
      text += qthermo::format_real(t) + ',' + qthermo::format_real(fq) + ',' +
              qthermo::format_real(qthermo::cramer_rao_bound(fq)) + '\n';
    }
  } else {
    nlohmann::json rows = nlohmann::json::array();
    for (double t : qthermo::temperature_grid(grid_cfg)) {
      const double fq = qthermo::qfi_thermal_closed_form(t);
      rows.push_back({{"temperature", t}, {"thermal_qfi", fq}, {"cramer_rao_bound", qthermo::cramer_rao_bound(fq)}});
    }
    text = nlohmann::json{{"records", rows}}.dump(2) + "\n";
  }
  if (f.out == "-") {
    std::cout << text;
    return 0;
  }
  std::ofstream os(f.out, std::ios::binary | std::ios::trunc);
  if (!os || !(os << text)) throw std::runtime_error("cannot write '" + f.out + "'");
  return 0;
}

struct VerifyFlags {
  std::string level = "quick";
  std::uint64_t seed = 20260101;
  std::vector<std::string> modules;
};

int run_verify_command(const VerifyFlags& f) {
  qthermo::VerifyOptions o;
  o.level = qthermo::parse_verify_level(f.level);
  o.seed = f.seed;
  o.modules = f.modules;
  const auto report = qthermo::verify_suite(o, [](const qthermo::CheckResult& c) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.module << " / " << c.name << ": " << c.detail << std::endl;
  });
  std::cout << report.checks.size() - report.failures() << " of " << report.checks.size() << " checks passed\n";
  if (report.checks.empty()) {
    std::cerr << "thermobench: no checks selected\n";
    return kExitConfig;
  }
  return report.passed() ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum thermometry benchmark: optimal QFI of CPTP and non-CPTP temperature encodings"};
  app.require_subcommand(1);
  // -h is taken by the stencil step.
  app.set_help_flag("--help", "print this help message and exit");

  SweepFlags sf;
  auto* sweep = app.add_subcommand("sweep", "optimal QFI over a temperature grid");
  sweep->add_option("--config", sf.config, "JSON file whose keys mirror the sweep configuration");
  sweep->add_option("--scenario", sf.scenarios, "cptp, ncptp1, ncptp2, ncptp2-bound or all (repeatable)")
      ->delimiter(',');
  sweep->add_option("--unitary-family", sf.family, "general, energy-conserving, xx or xy");
  sweep->add_option("--t-min", sf.t_min, "lowest temperature (default 1)");
  sweep->add_option("--t-max", sf.t_max, "highest temperature (default 2)");
  sweep->add_option("--t-step", sf.t_step, "grid spacing (default 0.01)");
  sweep->add_flag("--coarse", sf.coarse, "11-point grid over [t-min, t-max]");
  sweep->add_option("--states", sf.states, "sampled joint states per temperature (default 100)");
  sweep->add_option("--bound-runs", sf.bound_runs, "independent upper-bound runs per temperature (default 10)");
  sweep->add_option("--seed", sf.seed, "master seed");
  sweep->add_option("--restarts", sf.restarts, "restarts per cptp/ncptp1 point (default 50)");
  sweep->add_option("--budget", sf.budget, "evaluations per restart for cptp/ncptp1 points (default 5000)");
  sweep->add_option("--cloud-restarts", sf.cloud_restarts, "restarts per sampled state (default 8)");
  sweep->add_option("--cloud-budget", sf.cloud_budget, "evaluations per restart per sampled state (default 2000)");
  sweep->add_option("--bound-restarts", sf.bound_restarts, "restarts per upper-bound run (default 20)");
  sweep->add_option("--bound-budget", sf.bound_budget, "evaluations per restart per upper-bound run (default 5000)");
  sweep->add_option("--h", sf.h, "stencil step (default 0.001)");
  sweep->add_option("--workers", sf.workers, "worker threads, 0 for all cores (default 1)");
  sweep->add_option("--format", sf.format, "csv or json")->capture_default_str();
  sweep->add_option("--out", sf.out, "output path, - for stdout")->capture_default_str();

  QfiFlags qf;
  auto* qfi = app.add_subcommand("qfi", "optimal QFI of one scenario at one temperature");
  qfi->add_option("--scenario", qf.scenario, "cptp, ncptp1, ncptp2 or ncptp2-bound")->capture_default_str();
  qfi->add_option("--unitary-family", qf.family, "general, energy-conserving, xx or xy")->capture_default_str();
  qfi->add_option("--t", qf.t, "temperature")->capture_default_str();
  qfi->add_option("--h", qf.h, "stencil step")->capture_default_str();
  qfi->add_option("--seed", qf.seed, "seed")->capture_default_str();
  qfi->add_option("--restarts", qf.restarts, "optimizer restarts")->capture_default_str();
  qfi->add_option("--budget", qf.budget, "evaluations per restart")->capture_default_str();
  qfi->add_option("--format", qf.format, "csv or json")->capture_default_str();
  qfi->add_option("--out", qf.out, "output path, - for stdout")->capture_default_str();

  ThermalFlags tf;
  auto* thermal = app.add_subcommand("thermal", "closed-form thermal QFI reference curve");
  thermal->add_option("--t-min", tf.t_min, "lowest temperature")->capture_default_str();
  thermal->add_option("--t-max", tf.t_max, "highest temperature")->capture_default_str();
  thermal->add_option("--t-step", tf.t_step, "grid spacing")->capture_default_str();
  thermal->add_option("--format", tf.format, "csv or json")->capture_default_str();
  thermal->add_option("--out", tf.out, "output path, - for stdout")->capture_default_str();

  VerifyFlags vf;
  auto* verify = app.add_subcommand("verify", "run the property suites");
  verify->add_option("--level", vf.level, "quick or full")->capture_default_str();
  verify->add_option("--seed", vf.seed, "seed")->capture_default_str();
  verify->add_option("--module", vf.modules, "restrict to these modules (repeatable)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*sweep) return run_sweep_command(sf, *sweep);
    if (*qfi) return run_qfi_command(qf);
    if (*thermal) return run_thermal_command(tf);
    if (*verify) return run_verify_command(vf);
  } catch (const qthermo::SweepError& e) {
    std::cerr << "thermobench: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "thermobench: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
