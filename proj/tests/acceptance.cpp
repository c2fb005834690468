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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Sweeps use the 11-point coarse grid on [1, 2] and one shared cloud
// of 100 sampled joint states.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qthermo/qthermo.hpp"

namespace {

using namespace qthermo;

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(double v, int digits = 6) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// ---------------------------------------------------------------------------
// Shared sweep data

constexpr std::uint64_t kSeed = 2026;
constexpr std::size_t kStates = 100;
constexpr std::size_t kDraws = 1000;
constexpr std::size_t kInvarianceDraws = 500;

SweepConfig coarse_config(UnitaryFamily family, std::vector<ProblemKind> scenarios) {
  SweepConfig c;
  c.t_min = 1.0;
  c.t_max = 2.0;
  c.t_step = 0.1;
  c.family = family;
  c.scenarios = std::move(scenarios);
  c.n_states = kStates;
  c.master_seed = kSeed;
  return c;
}

struct SweepData {
  std::vector<TwoQubitStateParams> cloud;
  std::map<UnitaryFamily, std::vector<SweepRecord>> records;
  std::vector<SweepRecord> bound;
};

std::vector<SweepRecord> select(const std::vector<SweepRecord>& recs, const std::string& scenario) {
  std::vector<SweepRecord> out;
  for (const SweepRecord& r : recs)
    if (r.scenario == scenario) out.push_back(r);
  return out;
}

SweepData& sweep_data() {
  static SweepData data = [] {
    SweepData d;
    auto t0 = std::chrono::steady_clock::now();
    d.cloud = sample_state_cloud(coarse_config(UnitaryFamily::general, {ProblemKind::ncptp2}));
    std::printf("  sampled %zu joint states in %.1f s\n", d.cloud.size(),
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    for (UnitaryFamily f :
         {UnitaryFamily::general, UnitaryFamily::energy_conserving, UnitaryFamily::xx, UnitaryFamily::xy}) {
      t0 = std::chrono::steady_clock::now();
      d.records[f] = run_sweep(coarse_config(f, {ProblemKind::cptp, ProblemKind::ncptp1, ProblemKind::ncptp2}),
                               &d.cloud);
      std::printf("  %s sweep: %zu records in %.1f s\n", std::string(to_string(f)).c_str(), d.records[f].size(),
                  std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    t0 = std::chrono::steady_clock::now();
    d.bound = run_sweep(coarse_config(UnitaryFamily::general, {ProblemKind::ncptp2_bound}));
    std::printf("  upper-bound sweep: %zu records in %.1f s\n", d.bound.size(),
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    std::fflush(stdout);
    return d;
  }();
  return data;
}

// Every point record of `scenario` within `tol` relative of the thermal
// reference; reports the worst.
Outcome saturates(const std::vector<SweepRecord>& recs, const std::string& scenario, double tol,
                  const std::string& label) {
  double worst = 0.0;
  double at = 0.0;
  std::size_t n = 0;
  for (const SweepRecord& r : select(recs, scenario)) {
    ++n;
    const double d = rel(r.optimal_qfi, r.thermal_qfi_reference);
    if (d > worst) {
      worst = d;
      at = r.temperature;
    }
  }
  return {n == 11 && worst <= tol, label + " worst relative gap " + fmt(worst, 3) + " at T = " + fmt(at, 3)};
}

// ---------------------------------------------------------------------------
// Criteria

Outcome criterion1() {
  double worst = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double t = 1.0 + 0.01 * i;
    const double closed = qfi_thermal_closed_form(t);
    const double analytic = qfi(DensityMatrix<2>(qubit_thermal_matrix(t)), qubit_thermal_derivative(t));
    const double stencil = qfi_stencil([](double s) { return qubit_thermal_matrix(s); }, t);
    worst = std::max({worst, rel(analytic, closed), rel(stencil, closed), rel(stencil, analytic)});
  }
  const double f1 = qfi_thermal_closed_form(1.0);
  const double f2 = qfi_thermal_closed_form(2.0);
  const bool spots = std::abs(f1 - 0.419974) <= 5e-7 && std::abs(f2 - 0.049153) <= 5e-7;
  return {worst <= 1e-6 && spots,
          "worst relative disagreement " + fmt(worst, 3) + " over 101 points; F(1) = " + fmt(f1) + ", F(2) = " + fmt(f2)};
}

Outcome criterion2() {
  Rng rng(derive_seed(kSeed, {102}));
  double worst = -std::numeric_limits<double>::infinity();
  for (double t : {1.0, 1.5, 2.0}) {
    const double ref = qfi_thermal_closed_form(t);
    for (std::size_t k = 0; k < kDraws; ++k) {
      const Matrix2 probe = bloch_matrix(draw::bloch(rng));
      const Matrix4 u = draw::general_unitary(rng);
      worst = std::max(worst, qfi_stencil([&](double s) { return partial_trace_env(cptp_joint(probe, u, s)); }, t) - ref);
    }
  }
  return {worst <= 1e-5, "3 x " + std::to_string(kDraws) + " draws, max(F - F_thermal) = " + fmt(worst, 3)};
}

Outcome criterion3() {
  Rng rng(derive_seed(kSeed, {103}));
  double worst = -std::numeric_limits<double>::infinity();
  double joint = 0.0;
  for (double t : {1.0, 1.5, 2.0}) {
    const double ref = qfi_thermal_closed_form(t);
    for (std::size_t k = 0; k < kDraws; ++k) {
      const Matrix4 w = ncptp1_combined(local_u1(draw::u1_params(rng)), draw::general_unitary(rng));
      worst = std::max(worst, qfi_stencil([&](double s) { return partial_trace_env(ncptp1_joint(w, s)); }, t) - ref);
    }
    joint = std::max(joint, std::abs(qfi_stencil([](double s) { return purification(s); }, t) - ref));
  }
  return {worst <= 1e-5 && joint <= 1e-8, "3 x " + std::to_string(kDraws) + " draws, max(F - F_thermal) = " +
                                              fmt(worst, 3) + "; purification |F - F_thermal| = " + fmt(joint, 3)};
}

Outcome criterion4() {
  const SweepData& d = sweep_data();
  const Outcome g = saturates(d.records.at(UnitaryFamily::general), "cptp", 0.01, "general");
  const Outcome e = saturates(d.records.at(UnitaryFamily::energy_conserving), "cptp", 0.01, "energy-conserving");
  Rng rng(derive_seed(kSeed, {104}));
  double swap_dev = 0.0;
  for (std::size_t k = 0; k < 100; ++k) {
    const double t = rng.uniform(1.0, 2.0);
    const DensityMatrix<2> probe = bloch_state(draw::bloch(rng));
    swap_dev = std::max(swap_dev, max_norm(encode_cptp(probe, swap_gate(), t).matrix() - qubit_thermal_matrix(t)));
  }
  return {g.passed && e.passed && swap_dev <= 1e-15,
          g.detail + "; " + e.detail + "; SWAP fixture max deviation " + fmt(swap_dev, 3)};
}

Outcome criterion5() {
  const SweepData& d = sweep_data();
  const Outcome g = saturates(d.records.at(UnitaryFamily::general), "ncptp1", 0.01, "general");
  const Outcome e = saturates(d.records.at(UnitaryFamily::energy_conserving), "ncptp1", 0.01, "energy-conserving");

  // Energy-conserving optimum with U1 pinned to the diagonal subfamily.
  double worst_gap = 0.0;
  double worst_state = 0.0;
  for (double t : temperature_grid(coarse_config(UnitaryFamily::general, {ProblemKind::cptp}))) {
    OptimizationProblem p = scenario_problem(ProblemKind::ncptp1, UnitaryFamily::energy_conserving, t);
    const std::size_t nu = unitary_param_count(UnitaryFamily::energy_conserving);
    p.lower[nu + 1] = p.upper[nu + 1] = 0.0;  // gamma = 0
    const OptimizationResult r = optimize(p, 10, derive_seed(kSeed, {105}), 3000);
    const DecodedPoint pt = decode_point(ProblemKind::ncptp1, UnitaryFamily::energy_conserving, r.best_params);
    worst_gap = std::max(worst_gap, rel(r.best_value, qfi_thermal_closed_form(t)));
    worst_state = std::max(worst_state, max_norm(encode(pt.scenario, pt.unitary, t).matrix() - qubit_thermal_matrix(t)));
  }
  return {g.passed && e.passed && worst_gap <= 0.01 && worst_state <= 1e-6,
          g.detail + "; " + e.detail + "; diagonal-U1 optimum gap " + fmt(worst_gap, 3) + ", state deviation " +
              fmt(worst_state, 3)};
}

Outcome criterion6() {
  const SweepData& d = sweep_data();
  std::map<double, double> bound;
  for (const SweepRecord& r : select(d.bound, "ncptp2-bound")) bound[r.temperature] = r.optimal_qfi;
  bool ok = bound.size() == 11;
  double min_ratio = std::numeric_limits<double>::infinity();
  double min_slack = std::numeric_limits<double>::infinity();
  std::size_t n = 0;
  for (UnitaryFamily f : {UnitaryFamily::general, UnitaryFamily::energy_conserving}) {
    const auto cloud = select(d.records.at(f), "ncptp2");
    ok = ok && cloud.size() == 11 * kStates;
    for (const SweepRecord& r : cloud) {
      ++n;
      min_ratio = std::min(min_ratio, r.optimal_qfi / r.thermal_qfi_reference);
      if (!(r.optimal_qfi > r.thermal_qfi_reference)) ok = false;
      const auto it = bound.find(r.temperature);
      if (it == bound.end()) {
        ok = false;
        continue;
      }
      min_slack = std::min(min_slack, it->second - r.optimal_qfi);
      if (it->second < r.optimal_qfi - 1e-6) ok = false;
    }
  }
  return {ok, std::to_string(n) + " cloud records; min F / F_thermal = " + fmt(min_ratio, 4) +
                  "; min (bound - F) = " + fmt(min_slack, 4) + "; bound at T = 1: " + fmt(bound[1.0], 5)};
}

Outcome criterion7() {
  const SweepData& d = sweep_data();
  const Matrix4 xx = fixed_unitary(UnitaryFamily::xx);
  const Matrix4 xy = fixed_unitary(UnitaryFamily::xy);
  const double c_xx = max_norm(commutator(xx, total_hamiltonian()));
  const double c_xy = max_norm(commutator(xy, total_hamiltonian()));
  bool ok = c_xx <= 1e-10 && c_xy > 0.01;

  const auto cptp_xx = select(d.records.at(UnitaryFamily::xx), "cptp");
  const auto cptp_xy = select(d.records.at(UnitaryFamily::xy), "cptp");
  ok = ok && cptp_xx.size() == 11 && cptp_xy.size() == 11;
  double worst_below = -std::numeric_limits<double>::infinity();
  double min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < std::min(cptp_xx.size(), cptp_xy.size()); ++i) {
    const double ref = cptp_xx[i].thermal_qfi_reference;
    worst_below = std::max({worst_below, cptp_xx[i].optimal_qfi - ref, cptp_xy[i].optimal_qfi - ref});
    min_margin = std::min(min_margin, cptp_xy[i].optimal_qfi - cptp_xx[i].optimal_qfi);
  }
  ok = ok && worst_below < 0.0 && min_margin > 0.0;

  const Outcome sx = saturates(d.records.at(UnitaryFamily::xx), "ncptp1", 0.01, "type-I xx");
  const Outcome sy = saturates(d.records.at(UnitaryFamily::xy), "ncptp1", 0.01, "type-I xy");
  double min_ratio = std::numeric_limits<double>::infinity();
  std::size_t n = 0;
  for (UnitaryFamily f : {UnitaryFamily::xx, UnitaryFamily::xy}) {
    for (const SweepRecord& r : select(d.records.at(f), "ncptp2")) {
      ++n;
      min_ratio = std::min(min_ratio, r.optimal_qfi / r.thermal_qfi_reference);
    }
  }
  ok = ok && sx.passed && sy.passed && n == 2 * 11 * kStates && min_ratio > 1.0;
  return {ok, "|[U_xx, H]| = " + fmt(c_xx, 3) + ", |[U_xy, H]| = " + fmt(c_xy, 5) +
                  "; CPTP max(F - F_thermal) = " + fmt(worst_below, 4) + ", min(F_xy - F_xx) = " + fmt(min_margin, 4) +
                  "; " + sx.detail + "; " + sy.detail + "; type-II min F / F_thermal = " + fmt(min_ratio, 4)};
}

Outcome criterion8() {
  const SweepData& d = sweep_data();
  // Per-T best of each scenario; type-II clouds reduce to their maximum.
  std::map<std::string, std::map<double, double>> series;
  auto add = [&](const std::vector<SweepRecord>& recs) {
    for (const SweepRecord& r : recs) {
      if (r.scenario == kBoundRunScenario) continue;
      auto& s = series[r.unitary_family + "/" + r.scenario];
      const auto [it, fresh] = s.emplace(r.temperature, r.optimal_qfi);
      if (!fresh) it->second = std::max(it->second, r.optimal_qfi);
    }
  };
  for (const auto& [f, recs] : d.records) add(recs);
  add(d.bound);

  std::size_t violations = 0;
  std::string first;
  for (const auto& [key, values] : series) {
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& [t, v] : values) {
      if (!(v < prev + 1e-6) && violations++ == 0) first = key + " at T = " + fmt(t, 3);
      prev = v;
    }
  }
  return {violations == 0 && series.size() == 13,
          std::to_string(series.size()) + " series, " + std::to_string(violations) + " increasing steps" +
              (violations ? " (first: " + first + ")" : "")};
}

Outcome criterion9() {
  Rng rng(derive_seed(kSeed, {109}));
  double additivity = 0.0;
  double invariance = 0.0;
  double monotone = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < kInvarianceDraws; ++k) {
    const double t = rng.uniform(1.0, 2.0);
    const Matrix2 probe = draw::density<2>(rng);
    const Matrix4 u = draw::general_unitary(rng);
    const double product = qfi_stencil([&](double s) { return tensor(probe, qubit_thermal_matrix(s)); }, t);
    const double evolved = qfi_stencil([&](double s) { return cptp_joint(probe, u, s); }, t);
    const double reduced = qfi_stencil([&](double s) { return partial_trace_env(cptp_joint(probe, u, s)); }, t);
    additivity = std::max(additivity, std::abs(product - qfi_thermal_closed_form(t)));
    invariance = std::max(invariance, std::abs(evolved - product));
    monotone = std::max(monotone, reduced - evolved);
  }
  return {additivity <= 1e-8 && invariance <= 1e-8 && monotone <= 1e-6,
          std::to_string(kInvarianceDraws) + " draws; additivity " + fmt(additivity, 3) + ", invariance " +
              fmt(invariance, 3) + ", max(F_S - F_SE) = " + fmt(monotone, 3)};
}

Outcome criterion10() {
  SweepConfig c = coarse_config(UnitaryFamily::energy_conserving, {ProblemKind::cptp, ProblemKind::ncptp1,
                                                                   ProblemKind::ncptp2, ProblemKind::ncptp2_bound});
  c.t_step = 0.5;
  c.n_states = 2;
  c.n_bound_runs = 2;
  c.point_budget = {3, 1000};
  c.cloud_budget = {2, 500};
  c.bound_budget = {2, 1000};
  const std::string a = to_csv(run_sweep(c));
  const std::string b = to_csv(run_sweep(c));
  c.workers = 3;
  const std::string w = to_csv(run_sweep(c));
  const bool ok = a == b && a == w && to_csv(parse_csv(a)) == a;
  return {ok, "two runs and a 3-worker run: " + std::to_string(a.size()) + " bytes, " +
                  (a == b && a == w ? "identical" : "different")};
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                          criterion5, criterion6, criterion7, criterion8,
                                                          criterion9, criterion10};
  const char* names[] = {"thermal QFI triple agreement",
                         "CPTP thermal-bound suite",
                         "type-I thermal-bound suite",
                         "CPTP saturation",
                         "type-I saturation",
                         "type-II advantage",
                         "XX and anisotropic XY models",
                         "monotonicity in T",
                         "invariance suite",
                         "determinism"};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %zu (%s): %s [%.1f s] %s\n", i + 1, names[i], o.passed ? "PASS" : "FAIL", secs,
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.passed) ++failures;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
