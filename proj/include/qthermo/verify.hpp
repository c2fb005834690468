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

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qthermo/channels.hpp"
#include "qthermo/draws.hpp"
#include "qthermo/fisher.hpp"
#include "qthermo/linalg.hpp"
#include "qthermo/optimizer.hpp"
#include "qthermo/results_io.hpp"
#include "qthermo/scenarios.hpp"
#include "qthermo/states.hpp"
#include "qthermo/sweep.hpp"
#include "qthermo/unitaries.hpp"

namespace qthermo {

enum class VerifyLevel { quick, full };

inline VerifyLevel parse_verify_level(std::string_view s) {
  if (s == "quick") return VerifyLevel::quick;
  if (s == "full") return VerifyLevel::full;
  throw std::invalid_argument("unknown verification level '" + std::string(s) + "'");
}

struct VerifyOptions {
  VerifyLevel level = VerifyLevel::quick;
  std::uint64_t seed = 20260101;
  /// Pair-exclusion threshold used by the thermal-bound suites.
  /// Anything but the default is a mutation and should make them fail.
  double qfi_threshold = kQfiPairThreshold;
  /// Empty runs everything; otherwise only checks whose module matches.
  std::vector<std::string> modules;
};

struct CheckResult {
  std::string module;
  std::string name;
  bool passed = false;
  std::size_t trials = 0;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyReport {
  std::vector<CheckResult> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }
  std::size_t failures() const {
    return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) {
      return !c.passed;
    }));
  }
};

inline void print_report(std::ostream& os, const VerifyReport& report) {
  for (const CheckResult& c : report.checks) {
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.2fs", c.seconds);
    os << (c.passed ? "PASS " : "FAIL ") << c.module << " / " << c.name << " (" << c.trials << " trials, " << secs
       << ")";
    if (!c.detail.empty()) os << ": " << c.detail;
    os << '\n';
  }
  os << (report.passed() ? "all " : "") << report.checks.size() - report.failures() << " of " << report.checks.size()
     << " checks passed\n";
}

namespace detail {

/// Largest observed violation against a tolerance.
class Worst {
 public:
  explicit Worst(double tolerance) : tol_(tolerance) {}
  void observe(double v) {
    if (!(v <= worst_)) worst_ = v;  // NaN sticks
  }
  bool ok() const { return worst_ <= tol_; }
  std::string text() const {
    std::ostringstream os;
    os.precision(3);
    os << "worst " << worst_ << " (tolerance " << tol_ << ")";
    return os.str();
  }

 private:
  double tol_;
  double worst_ = 0.0;
};

struct VerifyContext {
  const VerifyOptions& opt;
  std::size_t count(std::size_t full) const {
    return opt.level == VerifyLevel::full ? full : std::min<std::size_t>(full, 100);
  }
  bool full() const { return opt.level == VerifyLevel::full; }
  Rng rng(std::string_view check) const {
    std::uint64_t key = 1469598103934665603ULL;  // FNV-1a of the check name
    for (char ch : check) key = (key ^ static_cast<unsigned char>(ch)) * 1099511628211ULL;
    return Rng(derive_seed(opt.seed, {key}));
  }
};

using CheckFn = std::function<CheckResult(const VerifyContext&)>;

struct CheckSpec {
  const char* module;
  const char* name;
  CheckFn fn;
};

inline CheckResult verdict(std::size_t trials, const Worst& w) { return {"", "", w.ok(), trials, w.text(), 0.0}; }

inline CheckResult verdict(std::size_t trials, bool ok, std::string detail) {
  return {"", "", ok, trials, std::move(detail), 0.0};
}

inline std::vector<double> sweep_grid(std::size_t points) {
  std::vector<double> t(points);
  for (std::size_t i = 0; i < points; ++i) t[i] = 1.0 + static_cast<double>(i) / static_cast<double>(points - 1);
  return t;
}

inline double encoded_qfi(const std::function<Matrix2(double)>& fn, double t, double threshold) {
  const Matrix2 deriv = state_derivative_stencil(fn, t);
  return qfi_detail(fn(t), deriv, threshold).value;
}

// ---------------------------------------------------------------------------
// dense-complex-linalg

inline CheckResult check_eig_reconstruction(const VerifyContext& ctx) {
  Rng rng = ctx.rng("eig");
  const std::size_t n = ctx.count(1000);
  Worst w(1e-10);
  for (std::size_t k = 0; k < n; ++k) {
    const Matrix4 m = draw::hermitian<4>(rng);
    const auto ed = eig_hermitian(m);
    Matrix4 d;
    for (std::size_t i = 0; i < 4; ++i) d(i, i) = ed.eigenvalues[i];
    w.observe(max_norm(ed.eigenvectors * d * adjoint(ed.eigenvectors) - m));
    for (std::size_t i = 1; i < 4; ++i) w.observe(ed.eigenvalues[i - 1] - ed.eigenvalues[i]);
  }
  return verdict(n, w);
}

inline CheckResult check_tensor_associative(const VerifyContext& ctx) {
  Rng rng = ctx.rng("tensor");
  const std::size_t n = ctx.count(1000);
  // Small-integer entries keep every product exact, as for the Pauli algebra.
  auto integral = [&rng] {
    Matrix2 m;
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        m(i, j) = Complex(std::floor(rng.uniform(-4.0, 5.0)), std::floor(rng.uniform(-4.0, 5.0)));
    return m;
  };
  bool ok = true;
  for (const Matrix2& a : pauli::kXYZ)
    for (const Matrix2& b : pauli::kXYZ)
      for (const Matrix2& c : pauli::kXYZ) ok = ok && tensor(tensor(a, b), c) == tensor(a, tensor(b, c));
  for (std::size_t k = 0; k < n; ++k) {
    const Matrix2 a = integral(), b = integral(), c = integral();
    ok = ok && tensor(tensor(a, b), c) == tensor(a, tensor(b, c));
  }
  return verdict(n + 27, ok, ok ? "exact" : "entries differ");
}

inline CheckResult check_partial_trace_trace(const VerifyContext& ctx) {
  Rng rng = ctx.rng("ptrace");
  const std::size_t n = ctx.count(1000);
  Worst w(1e-12);
  for (std::size_t k = 0; k < n; ++k) {
    const Matrix2 a = draw::hermitian<2>(rng), b = draw::hermitian<2>(rng);
    const Matrix4 u = draw::general_unitary(rng);
    const Complex lhs = trace(partial_trace_env(u * tensor(a, b) * adjoint(u)));
    w.observe(std::abs(lhs - trace(a) * trace(b)));
  }
  return verdict(n, w);
}

inline CheckResult check_exp_unitary(const VerifyContext& ctx) {
  Rng rng = ctx.rng("exp");
  const std::size_t n = ctx.count(1000);
  Worst w(1e-10);
  for (std::size_t k = 0; k < n; ++k) w.observe(unitarity_deviation(exp_minus_i_hermitian(draw::hermitian<4>(rng, 3.0))));
  return verdict(n, w);
}

// ---------------------------------------------------------------------------
// quantum-states

inline CheckResult check_thermal_populations(const VerifyContext&) {
  const auto grid = sweep_grid(101);
  bool ok = true;
  for (double t : {0.05, 0.5, 1.0, 1.5, 2.0, 10.0, 1e3}) {
    const Matrix2 tau = thermal_state(ThermalSpec<2>{t}).matrix();
    ok = ok && tau(1, 1).real() > tau(0, 0).real();
  }
  for (double t : grid) {
    const Matrix2 tau = qubit_thermal_matrix(t);
    ok = ok && tau(1, 1).real() > tau(0, 0).real();
  }
  return verdict(grid.size() + 7, ok, ok ? "ground state dominates" : "population order violated");
}

inline CheckResult check_purification_marginal(const VerifyContext&) {
  const auto grid = sweep_grid(101);
  Worst w(1e-12);
  for (double t : grid) {
    const Matrix4 psi = purification(t).matrix();
    w.observe(max_norm(partial_trace_probe(psi) - qubit_thermal_matrix(t)));
    w.observe(max_norm(partial_trace_env(psi) - qubit_thermal_matrix(t)));
  }
  return verdict(grid.size(), w);
}

inline CheckResult check_constrained_marginal(const VerifyContext& ctx) {
  const std::size_t n = ctx.full() ? 10 : 3;
  Worst w(1e-12);
  double rate_min = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    const SampledState s = sample_constrained_state(derive_seed(ctx.opt.seed, {0x5a, k}), 1.0);
    rate_min = std::min(rate_min, 1.0 / static_cast<double>(s.draws));
    for (double t : {1.0 - 0.002, 1.0, 1.0 + 0.002}) {
      const DensityMatrix<4> rho = constrained_two_qubit_state(s.params, t);
      w.observe(max_norm(partial_trace_probe(rho.matrix()) - qubit_thermal_matrix(t)));
    }
  }
  CheckResult r = verdict(n, w);
  r.passed = r.passed && rate_min > 0.0;
  std::ostringstream os;
  os.precision(3);
  os << r.detail << ", lowest per-sample acceptance " << rate_min;
  r.detail = os.str();
  return r;
}

inline CheckResult check_thermal_stencil(const VerifyContext&) {
  const auto grid = sweep_grid(101);
  Worst w(1e-9);
  for (double t : grid) {
    const Matrix2 d = state_derivative_stencil([](double s) { return qubit_thermal_matrix(s); }, t);
    w.observe(max_norm(d - qubit_thermal_derivative(t)));
  }
  return verdict(grid.size(), w);
}

// ---------------------------------------------------------------------------
// unitary-families

inline CheckResult check_builders_unitary(const VerifyContext& ctx) {
  Rng rng = ctx.rng("builders");
  const std::size_t n = ctx.count(1000);
  Worst w(1e-10);
  Worst det(1e-12);
  for (std::size_t k = 0; k < n; ++k) {
    const Matrix2 s = su2(draw::su2_params(rng));
    w.observe(unitarity_deviation(s));
    det.observe(std::abs(s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0) - 1.0));
    w.observe(unitarity_deviation(local_u1(draw::u1_params(rng))));
    w.observe(unitarity_deviation(draw::general_unitary(rng)));
    w.observe(unitarity_deviation(energy_conserving(draw::energy_conserving_params(rng))));
    w.observe(unitarity_deviation(swap_like(rng.uniform(0, kTwoPi), rng.uniform(0, kTwoPi), rng.uniform(0, kTwoPi))));
  }
  w.observe(unitarity_deviation(xy_unitary(kXxModel)));
  w.observe(unitarity_deviation(xy_unitary(kAnisotropicXyModel)));
  CheckResult r = verdict(n, w);
  r.passed = r.passed && det.ok();
  r.detail += "; det " + det.text();
  return r;
}

inline CheckResult check_core_factors_commute(const VerifyContext& ctx) {
  Rng rng = ctx.rng("core");
  const std::size_t n = ctx.count(1000);
  Worst w(1e-12);
  Worst ref(1e-10);
  for (std::size_t k = 0; k < n; ++k) {
    const double ax = rng.uniform(0, 0.5 * kPi), ay = rng.uniform(0, 0.5 * kPi), az = rng.uniform(0, 0.5 * kPi);
    const Matrix4 x = pauli_pair_rotation(pauli::kX, ax);
    const Matrix4 y = pauli_pair_rotation(pauli::kY, ay);
    const Matrix4 z = pauli_pair_rotation(pauli::kZ, az);
    w.observe(max_norm(commutator(x, y)));
    w.observe(max_norm(commutator(y, z)));
    w.observe(max_norm(commutator(x, z)));
    ref.observe(max_norm(nonlocal_core(ax, ay, az) - nonlocal_core_reference(ax, ay, az)));
  }
  CheckResult r = verdict(n, w);
  r.passed = r.passed && ref.ok();
  r.detail += "; closed form vs eigensolver " + ref.text();
  return r;
}

inline CheckResult check_energy_conserving_commute(const VerifyContext& ctx) {
  Rng rng = ctx.rng("ec");
  const std::size_t n = ctx.count(1000);
  const Matrix4& ht = total_hamiltonian();
  Worst w(1e-10);
  for (std::size_t k = 0; k < n; ++k) {
    w.observe(max_norm(commutator(energy_conserving(draw::energy_conserving_params(rng)), ht)));
    w.observe(max_norm(commutator(swap_like(rng.uniform(0, kTwoPi), rng.uniform(0, kTwoPi), rng.uniform(0, kTwoPi)), ht)));
  }
  return verdict(n, w);
}

inline CheckResult check_swap_returns_thermal(const VerifyContext& ctx) {
  Rng rng = ctx.rng("swap");
  const std::size_t n = ctx.count(100);
  Worst w(1e-15);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = rng.uniform(1.0, 2.0);
    const DensityMatrix<2> out = encode_cptp(bloch_state(draw::bloch(rng)), swap_gate(), t);
    w.observe(max_norm(out.matrix() - qubit_thermal_matrix(t)));
  }
  return verdict(n, w);
}

inline CheckResult check_xy_models(const VerifyContext&) {
  const Matrix4& ht = total_hamiltonian();
  const double xx = max_norm(commutator(xy_unitary(kXxModel), ht));
  const double xy = max_norm(commutator(xy_unitary(kAnisotropicXyModel), ht));
  const Matrix4 free = xy_unitary({0.0, 0.0});
  const Matrix4 expect = Matrix4::diagonal({std::exp(-2.0 * kI), 1.0, 1.0, std::exp(2.0 * kI)});
  const double diag = max_norm(free - expect);
  std::ostringstream os;
  os.precision(3);
  os << "|[U_xx, H_T]| = " << xx << ", |[U_xy, H_T]| = " << xy << ", free evolution error " << diag;
  return verdict(3, xx < 1e-10 && xy > 0.01 && diag < 1e-12, os.str());
}

// ---------------------------------------------------------------------------
// encoding-channels

inline CheckResult check_trace_preservation(const VerifyContext& ctx) {
  Rng rng = ctx.rng("trace");
  const std::size_t n = ctx.count(1000);
  Worst w(1e-10);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = rng.uniform(1.0, 2.0);
    const Matrix4 u = draw::general_unitary(rng);
    w.observe(std::abs(trace(encode_cptp(bloch_state(draw::bloch(rng)), u, t).matrix()) - 1.0));
    w.observe(std::abs(trace(encode_ncptp1(draw::u1_params(rng), u, t).matrix()) - 1.0));
  }
  return verdict(n, w);
}

inline CheckResult check_partial_trace_monotone(const VerifyContext& ctx) {
  Rng rng = ctx.rng("monotone");
  const std::size_t n = ctx.count(500);
  Worst w(1e-6);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = rng.uniform(1.0, 2.0);
    const Matrix4 u = k % 2 ? draw::general_unitary(rng) : energy_conserving(draw::energy_conserving_params(rng));
    if (k % 3 == 0) {
      const Matrix2 probe = bloch_matrix(draw::bloch(rng));
      const double joint = qfi_stencil([&](double s) { return cptp_joint(probe, u, s); }, t);
      const double local = qfi_stencil([&](double s) { return partial_trace_env(cptp_joint(probe, u, s)); }, t);
      w.observe(local - joint);
    } else {
      const Matrix4 combined = ncptp1_combined(local_u1(draw::u1_params(rng)), u);
      const double joint = qfi_stencil([&](double s) { return ncptp1_joint(combined, s); }, t);
      const double local = qfi_stencil([&](double s) { return partial_trace_env(ncptp1_joint(combined, s)); }, t);
      w.observe(local - joint);
    }
  }
  return verdict(n, w);
}

inline CheckResult check_unitary_invariance(const VerifyContext& ctx) {
  Rng rng = ctx.rng("invariance");
  const std::size_t n = ctx.count(500);
  Worst w(1e-8);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = rng.uniform(1.0, 2.0);
    const Matrix4 u = draw::general_unitary(rng);
    const Matrix2 probe = bloch_matrix(draw::bloch(rng));
    const double before = qfi_stencil([&](double s) { return tensor(probe, qubit_thermal_matrix(s)); }, t);
    const double after = qfi_stencil([&](double s) { return cptp_joint(probe, u, s); }, t);
    w.observe(std::abs(after - before));
  }
  return verdict(n, w);
}

inline CheckResult check_additivity(const VerifyContext& ctx) {
  Rng rng = ctx.rng("additivity");
  const std::size_t n = ctx.count(100);
  Worst w(1e-8);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = rng.uniform(1.0, 2.0);
    const Matrix2 probe = draw::density<2>(rng);
    const double joint = qfi_stencil([&](double s) { return tensor(probe, qubit_thermal_matrix(s)); }, t);
    w.observe(std::abs(joint - qfi_thermal_closed_form(t)));
  }
  return verdict(n, w);
}

// ---------------------------------------------------------------------------
// fisher-information

inline CheckResult check_cptp_bound(const VerifyContext& ctx) {
  Rng rng = ctx.rng("cptp-bound");
  const std::size_t n = ctx.count(1000);
  const double thr = ctx.opt.qfi_threshold;
  Worst bound(1e-5);
  Worst saturation(1e-8);
  for (double t : {1.0, 1.5, 2.0}) {
    const double ref = qfi_thermal_closed_form(t);
    for (std::size_t k = 0; k < n; ++k) {
      const Matrix2 probe = bloch_state(draw::bloch(rng)).matrix();
      const Matrix4 u = draw::general_unitary(rng);
      bound.observe(encoded_qfi([&](double s) { return partial_trace_env(cptp_joint(probe, u, s)); }, t, thr) - ref);
    }
    // The bound is attained: SWAP hands the probe the thermal state.
    const Matrix2 probe = bloch_matrix({0.3, -0.2, 0.5});
    const double swapped =
        encoded_qfi([&](double s) { return partial_trace_env(cptp_joint(probe, swap_gate(), s)); }, t, thr);
    saturation.observe(std::abs(swapped - ref));
  }
  CheckResult r = verdict(3 * n, bound.ok() && saturation.ok(), "bound " + bound.text() + "; SWAP saturation " +
                                                                     saturation.text());
  return r;
}

inline CheckResult check_purification_bound(const VerifyContext& ctx) {
  Rng rng = ctx.rng("purification-bound");
  const std::size_t n = ctx.count(1000);
  const double thr = ctx.opt.qfi_threshold;
  Worst bound(1e-5);
  Worst joint(1e-8);
  for (double t : {1.0, 1.5, 2.0}) {
    const double ref = qfi_thermal_closed_form(t);
    for (std::size_t k = 0; k < n; ++k) {
      const Matrix4 combined = ncptp1_combined(local_u1(draw::u1_params(rng)), draw::general_unitary(rng));
      bound.observe(encoded_qfi([&](double s) { return partial_trace_env(ncptp1_joint(combined, s)); }, t, thr) - ref);
    }
    const auto pure = [](double s) { return purification(s).matrix(); };
    const Matrix4 deriv = state_derivative_stencil(pure, t);
    joint.observe(std::abs(qfi_detail(pure(t), deriv, thr).value - ref));
    joint.observe(std::abs(qfi_pure_state(thermal_spectrum_derivative(t)) - ref));
  }
  return verdict(3 * n, bound.ok() && joint.ok(), "bound " + bound.text() + "; purification " + joint.text());
}

inline CheckResult check_formula_agreement(const VerifyContext&) {
  const auto grid = sweep_grid(101);
  Worst w(1e-6);
  for (double t : grid) {
    const double closed = qfi_thermal_closed_form(t);
    const DensityMatrix<2> tau(qubit_thermal_matrix(t));
    const double analytic = qfi(tau, qubit_thermal_derivative(t));
    const double stencil = qfi_stencil([](double s) { return qubit_thermal_matrix(s); }, t);
    const auto sd = thermal_spectrum_derivative(t);
    const double spectral = qfi_diagonal_spectrum(sd.p, sd.p_dot);
    for (double v : {analytic, stencil, spectral}) w.observe(std::abs(v - closed) / closed);
  }
  const bool spots = std::abs(qfi_thermal_closed_form(1.0) - 0.419974) < 5e-7 &&
                     std::abs(qfi_thermal_closed_form(2.0) - 0.049153) < 5e-7;
  return verdict(grid.size(), w.ok() && spots, w.text() + (spots ? "" : "; spot values off"));
}

inline CheckResult check_qfi_nonnegative(const VerifyContext& ctx) {
  Rng rng = ctx.rng("nonneg");
  const std::size_t n = ctx.count(1000);
  bool ok = true;
  for (std::size_t k = 0; k < n; ++k) {
    const Matrix4 rho = draw::density<4>(rng);
    Matrix4 d = draw::hermitian<4>(rng);
    d = d - (trace(d).real() / 4.0) * Matrix4::identity();
    ok = ok && qfi_detail(rho, d).value >= 0.0 && qfi_detail(rho, Matrix4{}).value == 0.0;
  }
  return verdict(n, ok, ok ? "non-negative, zero for zero derivative" : "violated");
}

inline CheckResult check_no_exclusion_full_rank(const VerifyContext& ctx) {
  Rng rng = ctx.rng("exclusion");
  const std::size_t n = ctx.count(1000);
  std::size_t excluded = 0;
  std::size_t tested = 0;
  for (double t : sweep_grid(101)) {
    excluded += qfi_detail(qubit_thermal_matrix(t), qubit_thermal_derivative(t)).excluded_pairs;
    ++tested;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double t = rng.uniform(1.0, 2.0);
    const Matrix4 u = draw::general_unitary(rng);
    const Matrix2 probe = draw::density<2>(rng);
    const Matrix2 rho = partial_trace_env(cptp_joint(probe, u, t));
    if (min_eigenvalue(rho) <= 0.01) continue;
    const Matrix2 d = state_derivative_stencil([&](double s) { return partial_trace_env(cptp_joint(probe, u, s)); }, t);
    excluded += qfi_detail(rho, d).excluded_pairs;
    ++tested;
  }
  return verdict(tested, excluded == 0, std::to_string(excluded) + " excluded pairs");
}

inline CheckResult check_cramer_rao(const VerifyContext&) {
  const bool ok = std::abs(cramer_rao_bound(0.419974) - 2.38110) < 5e-6 && cramer_rao_bound(1.0) == 1.0 &&
                  cramer_rao_bound(0.5, 4) == 0.5;
  return verdict(3, ok, ok ? "reference values" : "mismatch");
}

// ---------------------------------------------------------------------------
// qfi-optimizer

inline CheckResult check_optimizer_reproducible(const VerifyContext& ctx) {
  const OptimizationProblem p = scenario_problem(ProblemKind::cptp, UnitaryFamily::general, 1.0);
  OptimizerOptions o;
  o.restarts = ctx.full() ? 8 : 3;
  o.budget = 2000;
  o.seed = ctx.opt.seed;
  const OptimizationResult a = optimize(p, o);
  const OptimizationResult b = optimize(p, o);
  const bool same = a.best_value == b.best_value && a.best_params == b.best_params && a.evaluations == b.evaluations;
  const double again = p.objective(a.best_params);
  const bool reeval = std::abs(again - a.best_value) <= 1e-10;
  std::ostringstream os;
  os << (same ? "bit-identical" : "runs differ") << "; re-evaluation gap " << std::abs(again - a.best_value);
  return verdict(2, same && reeval, os.str());
}

inline CheckResult check_optimizer_monotone(const VerifyContext& ctx) {
  const OptimizationProblem p = scenario_problem(ProblemKind::ncptp1, UnitaryFamily::energy_conserving, 1.3);
  OptimizerOptions o;
  o.restarts = ctx.full() ? 10 : 4;
  o.budget = 2000;
  o.seed = ctx.opt.seed + 1;
  std::vector<double> last(o.restarts, -std::numeric_limits<double>::infinity());
  bool ok = true;
  o.observer = [&](std::size_t r, double v) {
    if (v < last[r]) ok = false;
    last[r] = v;
  };
  optimize(p, o);
  return verdict(o.restarts, ok, ok ? "incumbents non-decreasing" : "incumbent decreased");
}

inline CheckResult check_optimizer_caps(const VerifyContext& ctx) {
  const std::vector<double> temps = ctx.full() ? sweep_grid(11) : std::vector<double>{1.0, 1.5, 2.0};
  Worst w(1e-4);
  std::size_t runs = 0;
  for (double t : temps) {
    const double ref = qfi_thermal_closed_form(t);
    for (ProblemKind kind : {ProblemKind::cptp, ProblemKind::ncptp1}) {
      for (UnitaryFamily f : {UnitaryFamily::general, UnitaryFamily::energy_conserving}) {
        OptimizerOptions o;
        o.restarts = ctx.full() ? 10 : 3;
        o.budget = 2000;
        o.seed = derive_seed(ctx.opt.seed, {static_cast<std::uint64_t>(kind), static_cast<std::uint64_t>(f), runs});
        w.observe(optimize(scenario_problem(kind, f, t), o).best_value / ref - 1.0);
        ++runs;
      }
    }
  }
  return verdict(runs, w);
}

inline CheckResult check_bound_ordering(const VerifyContext& ctx) {
  const double t = 1.0;
  const std::size_t n = ctx.full() ? 3 : 1;
  ScenarioOptions so;
  OptimizerOptions bo;
  bo.restarts = ctx.full() ? 10 : 4;
  bo.budget = 3000;
  bo.seed = ctx.opt.seed;
  bo.start = encode_state(TwoQubitStateParams{});
  const double bound = optimize(scenario_problem(ProblemKind::ncptp2_bound, UnitaryFamily::general, t), bo).best_value;
  double best_probe = optimize(scenario_problem(ProblemKind::cptp, UnitaryFamily::general, t), 4, ctx.opt.seed, 2000)
                          .best_value;
  for (std::size_t k = 0; k < n; ++k) {
    so.state = sample_constrained_state(derive_seed(ctx.opt.seed, {0xb0, k}), t).params;
    const OptimizationProblem cloud = scenario_problem(ProblemKind::ncptp2, UnitaryFamily::general, t, so);
    best_probe = std::max(best_probe, optimize(cloud, 4, ctx.opt.seed + k, 2000).best_value);
  }
  std::ostringstream os;
  os.precision(6);
  os << "bound " << bound << " vs best encoded probe " << best_probe;
  return verdict(n + 2, bound >= best_probe - 1e-6, os.str());
}

// ---------------------------------------------------------------------------
// thermobench-cli

inline SweepConfig verify_sweep_config(const VerifyContext& ctx) {
  SweepConfig c;
  c.t_min = 1.0;
  c.t_max = 2.0;
  c.t_step = ctx.full() ? 0.25 : 0.5;
  c.scenarios = {ProblemKind::cptp, ProblemKind::ncptp1};
  c.family = UnitaryFamily::energy_conserving;
  c.point_budget = {ctx.full() ? 10u : 4u, 2000};
  c.master_seed = ctx.opt.seed;
  return c;
}

inline CheckResult check_sweep_determinism(const VerifyContext& ctx) {
  SweepConfig c = verify_sweep_config(ctx);
  const std::string first = to_csv(run_sweep(c));
  c.workers = 2;
  const std::string second = to_csv(run_sweep(c));
  const bool ok = first == second && parse_csv(first).size() + 1 == static_cast<std::size_t>(
                                                                        std::count(first.begin(), first.end(), '\n'));
  return verdict(2, ok, ok ? "byte-identical CSV across runs and worker counts" : "CSV differs");
}

inline CheckResult check_sweep_shape(const VerifyContext& ctx) {
  const auto records = run_sweep(verify_sweep_config(ctx));
  bool ok = true;
  std::string why;
  for (const char* sc : {"cptp", "ncptp1"}) {
    double prev = std::numeric_limits<double>::infinity();
    for (const SweepRecord& r : records) {
      if (r.scenario != sc) continue;
      if (!(r.optimal_qfi < prev)) {
        ok = false;
        why = std::string(sc) + " not decreasing in T";
      }
      if (std::abs(r.optimal_qfi / r.thermal_qfi_reference - 1.0) > 0.01) {
        ok = false;
        why = std::string(sc) + " misses the thermal reference";
      }
      prev = r.optimal_qfi;
    }
  }
  return verdict(records.size(), ok, ok ? "decreasing and saturating" : why);
}

inline CheckResult check_xx_vs_xy(const VerifyContext& ctx) {
  const std::vector<double> temps = ctx.full() ? sweep_grid(11) : std::vector<double>{1.0, 1.5, 2.0};
  bool ok = true;
  std::ostringstream os;
  os.precision(5);
  for (double t : temps) {
    const double ref = qfi_thermal_closed_form(t);
    const double xx = optimize(scenario_problem(ProblemKind::cptp, UnitaryFamily::xx, t), 5, ctx.opt.seed, 2000)
                          .best_value;
    const double xy = optimize(scenario_problem(ProblemKind::cptp, UnitaryFamily::xy, t), 5, ctx.opt.seed, 2000)
                          .best_value;
    ok = ok && xx < ref && xy < ref && xy > xx;
    if (t == temps.front()) os << "T = " << t << ": xx " << xx << " < xy " << xy << " < thermal " << ref;
  }
  return verdict(temps.size(), ok, os.str());
}

inline CheckResult check_cloud_exceeds_thermal(const VerifyContext& ctx) {
  SweepConfig c;
  c.t_min = 1.0;
  c.t_max = 2.0;
  c.t_step = 1.0;
  c.scenarios = {ProblemKind::ncptp2};
  c.family = UnitaryFamily::energy_conserving;
  c.n_states = ctx.full() ? 10 : 2;
  c.cloud_budget = {4, 2000};
  c.master_seed = ctx.opt.seed;
  const auto records = run_sweep(c);
  double worst = std::numeric_limits<double>::infinity();
  for (const SweepRecord& r : records) worst = std::min(worst, r.optimal_qfi / r.thermal_qfi_reference);
  std::ostringstream os;
  os.precision(4);
  os << "smallest ratio to thermal " << worst;
  return verdict(records.size(), worst > 1.0, os.str());
}

inline const std::vector<CheckSpec>& all_checks() {
  static const std::vector<CheckSpec> checks = {
      {"dense-complex-linalg", "eigendecomposition reconstructs the input", check_eig_reconstruction},
      {"dense-complex-linalg", "tensor product is associative", check_tensor_associative},
      {"dense-complex-linalg", "partial trace keeps the trace", check_partial_trace_trace},
      {"dense-complex-linalg", "exp(-iH) is unitary", check_exp_unitary},
      {"quantum-states", "thermal populations ordered by energy", check_thermal_populations},
      {"quantum-states", "purification marginals are thermal", check_purification_marginal},
      {"quantum-states", "sampled state marginal is thermal", check_constrained_marginal},
      {"quantum-states", "stencil matches analytic thermal derivative", check_thermal_stencil},
      {"unitary-families", "builders are unitary", check_builders_unitary},
      {"unitary-families", "nonlocal factors commute", check_core_factors_commute},
      {"unitary-families", "energy-conserving and SWAP-like commute with H_T", check_energy_conserving_commute},
      {"unitary-families", "SWAP hands over the thermal state", check_swap_returns_thermal},
      {"unitary-families", "XX conserves energy, anisotropic XY does not", check_xy_models},
      {"encoding-channels", "trace preservation", check_trace_preservation},
      {"encoding-channels", "QFI monotone under partial trace", check_partial_trace_monotone},
      {"encoding-channels", "QFI invariant under fixed unitaries", check_unitary_invariance},
      {"encoding-channels", "QFI additive on product states", check_additivity},
      {"fisher-information", "CPTP thermal bound", check_cptp_bound},
      {"fisher-information", "purification thermal bound", check_purification_bound},
      {"fisher-information", "closed form, analytic and stencil QFI agree", check_formula_agreement},
      {"fisher-information", "QFI non-negative", check_qfi_nonnegative},
      {"fisher-information", "no pair exclusion for full-rank states", check_no_exclusion_full_rank},
      {"fisher-information", "Cramer-Rao reference values", check_cramer_rao},
      {"qfi-optimizer", "reproducible and re-evaluable", check_optimizer_reproducible},
      {"qfi-optimizer", "incumbent never decreases", check_optimizer_monotone},
      {"qfi-optimizer", "CPTP and type-I optima respect the thermal cap", check_optimizer_caps},
      {"qfi-optimizer", "joint-state bound dominates encoded probes", check_bound_ordering},
      {"thermobench-cli", "sweep output is deterministic", check_sweep_determinism},
      {"thermobench-cli", "sweep optima decrease and saturate", check_sweep_shape},
      {"thermobench-cli", "XY beats XX below the thermal reference", check_xx_vs_xy},
      {"thermobench-cli", "type-II cloud exceeds the thermal reference", check_cloud_exceeds_thermal},
  };
  return checks;
}

}  // namespace detail

/// Runs the property suites of every module. Failures, including unexpected
/// exceptions, are reported rather than thrown.
inline VerifyReport verify_suite(const VerifyOptions& options = {},
                                 const std::function<void(const CheckResult&)>& on_result = {}) {
  const detail::VerifyContext ctx{options};
  VerifyReport report;
  for (const detail::CheckSpec& spec : detail::all_checks()) {
    if (!options.modules.empty() &&
        std::find(options.modules.begin(), options.modules.end(), spec.module) == options.modules.end()) {
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = spec.fn(ctx);
    } catch (const std::exception& e) {
      r = {"", "", false, 0, std::string("threw: ") + e.what(), 0.0};
    }
    r.module = spec.module;
    r.name = spec.name;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (on_result) on_result(r);
    report.checks.push_back(std::move(r));
  }
  return report;
}

}  // namespace qthermo
