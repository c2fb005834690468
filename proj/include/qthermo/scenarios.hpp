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
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qthermo/channels.hpp"
#include "qthermo/draws.hpp"
#include "qthermo/fisher.hpp"
#include "qthermo/optimizer.hpp"
#include "qthermo/states.hpp"
#include "qthermo/unitaries.hpp"

namespace qthermo {

/// What an optimization run maximizes.
///  - ncptp2 with a parametrized family: unitary only, for one sampled state.
///  - ncptp2 with a fixed family: the 12 state parameters, started from a
///    sampled state.
///  - ncptp2_bound: QFI of the joint state itself over the 12 state
///    parameters (upper bound for every type-II encoding at that T).
enum class ProblemKind { cptp, ncptp1, ncptp2, ncptp2_bound };

inline std::string_view to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::cptp: return "cptp";
    case ProblemKind::ncptp1: return "ncptp1";
    case ProblemKind::ncptp2: return "ncptp2";
    case ProblemKind::ncptp2_bound: return "ncptp2-bound";
  }
  return "?";
}

inline ProblemKind parse_problem_kind(std::string_view s) {
  if (s == "cptp") return ProblemKind::cptp;
  if (s == "ncptp1") return ProblemKind::ncptp1;
  if (s == "ncptp2") return ProblemKind::ncptp2;
  if (s == "ncptp2-bound") return ProblemKind::ncptp2_bound;
  throw std::invalid_argument("unknown scenario '" + std::string(s) + "'");
}

inline constexpr double kDefaultPenalty = 1e4;

struct ScenarioOptions {
  StencilConfig stencil;
  double penalty = kDefaultPenalty;
  /// Sampled joint state; required for ProblemKind::ncptp2.
  std::optional<TwoQubitStateParams> state;
};

// ---------------------------------------------------------------------------
// Parameter layouts

inline constexpr std::size_t kStateParamCount = 12;

inline std::size_t unitary_param_count(UnitaryFamily f) {
  switch (f) {
    case UnitaryFamily::general: return 15;
    case UnitaryFamily::energy_conserving: return 5;
    default: return 0;
  }
}

namespace detail {
inline void push_box(std::vector<double>& lo, std::vector<double>& hi, double l, double h, std::size_t count = 1) {
  for (std::size_t i = 0; i < count; ++i) {
    lo.push_back(l);
    hi.push_back(h);
  }
}

// psi lives on [0, 4 pi); keep the box strictly inside.
inline const double kPsiUpper = std::nextafter(2.0 * kTwoPi, 0.0);

inline void unitary_box(UnitaryFamily f, std::vector<double>& lo, std::vector<double>& hi) {
  if (f == UnitaryFamily::general) {
    for (int k = 0; k < 4; ++k) {
      push_box(lo, hi, 0.0, kPi);
      push_box(lo, hi, 0.0, kTwoPi);
      push_box(lo, hi, 0.0, kPsiUpper);
    }
    push_box(lo, hi, 0.0, 0.5 * kPi, 3);
  } else if (f == UnitaryFamily::energy_conserving) {
    push_box(lo, hi, 0.0, kTwoPi, 5);
  }
}
}  // namespace detail

/// general: (theta, nu, psi) for W1..W4 then alpha_x, alpha_y, alpha_z.
/// energy-conserving: lambda1..lambda5.
inline Matrix4 decode_unitary(UnitaryFamily f, std::span<const double> x) {
  if (x.size() != unitary_param_count(f)) throw std::invalid_argument("wrong unitary parameter count");
  switch (f) {
    case UnitaryFamily::general: {
      KrausCiracParams p;
      for (std::size_t k = 0; k < 4; ++k) p.w[k] = {x[3 * k], x[3 * k + 1], x[3 * k + 2]};
      p.alpha_x = x[12];
      p.alpha_y = x[13];
      p.alpha_z = x[14];
      return kraus_cirac(p);
    }
    case UnitaryFamily::energy_conserving: {
      EnergyConservingParams p;
      std::copy(x.begin(), x.end(), p.lambda.begin());
      return energy_conserving(p);
    }
    default: return fixed_unitary(f);
  }
}

/// Bloch components; radially projected into the unit ball.
inline BlochVector decode_bloch(std::span<const double> x) { return project_to_ball({x[0], x[1], x[2]}); }

inline LocalU1Params decode_u1(std::span<const double> x) { return {x[0], x[1], x[2]}; }

/// a (3) then C row-major (9); b is left zero.
inline TwoQubitStateParams decode_state(std::span<const double> x) {
  if (x.size() != kStateParamCount) throw std::invalid_argument("wrong state parameter count");
  TwoQubitStateParams p;
  for (std::size_t i = 0; i < 3; ++i) p.a[i] = x[i];
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) p.c[i][j] = x[3 + 3 * i + j];
  return p;
}

inline std::vector<double> encode_state(const TwoQubitStateParams& p) {
  std::vector<double> x;
  x.reserve(kStateParamCount);
  x.insert(x.end(), p.a.begin(), p.a.end());
  for (const auto& row : p.c) x.insert(x.end(), row.begin(), row.end());
  return x;
}

/// Smallest eigenvalue of the constrained joint state over [T - 2h, T + 2h].
/// The joint matrix is affine in b_z, so checking the two ends suffices.
inline double stencil_min_eigenvalue(const TwoQubitStateParams& p, double temperature, const StencilConfig& cfg) {
  return std::min(min_eigenvalue(constrained_joint_matrix(p, temperature - 2.0 * cfg.h)),
                  min_eigenvalue(constrained_joint_matrix(p, temperature + 2.0 * cfg.h)));
}

namespace detail {

inline bool window_feasible(std::span<const double> x, double temperature, const StencilConfig& cfg) {
  return stencil_min_eigenvalue(decode_state(x), temperature, cfg) >= 0.0;
}

/// Uniform point of the cube pulled along the ray to the product state
/// (x = 0, always feasible) until it sits on the positivity boundary.
inline std::vector<double> boundary_start(Rng& rng, double temperature, const StencilConfig& cfg) {
  std::vector<double> x(kStateParamCount);
  for (double& v : x) v = rng.uniform(-1.0, 1.0);
  if (window_feasible(x, temperature, cfg)) return x;
  double lo = 0.0, hi = 1.0;
  std::vector<double> y(x.size());
  for (int it = 0; it < 50; ++it) {
    const double mid = 0.5 * (lo + hi);
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = mid * x[i];
    (window_feasible(y, temperature, cfg) ? lo : hi) = mid;
  }
  for (double& v : x) v *= lo;
  return x;
}

/// Purification of tau(T) with a random probe rotation, mixed with
/// 1/2 (x) tau(T) so it stays inside the window.
inline std::vector<double> purification_start(Rng& rng, double temperature) {
  constexpr double kMix = 0.01;
  const Matrix4 w = tensor(su2(draw::su2_params(rng)), pauli::kI2);
  const Matrix4 rho = (1.0 - kMix) * (w * purification(temperature).matrix() * adjoint(w)) +
                      kMix * tensor(0.5 * pauli::kI2, qubit_thermal_matrix(temperature));
  std::vector<double> x = encode_state(pauli_coefficients(rho));
  for (double& v : x) v = std::clamp(v, -1.0, 1.0);
  return x;
}

/// (1 - mu) P + mu (I - P) / 3 with P a randomly rotated purification of the
/// qubit state that keeps the environment marginal at tau(T). mu is the
/// smallest admixture that stays valid over the window.
inline std::vector<double> near_pure_start(Rng& rng, double temperature, const StencilConfig& cfg) {
  const double r = r_coefficient(temperature);
  const Matrix4 w = tensor(su2(draw::su2_params(rng)), pauli::kI2);
  auto point = [&](double mu) {
    const double q = (r - 2.0 * mu / 3.0) / (1.0 - 4.0 * mu / 3.0);
    const double c0 = std::sqrt(1.0 - q), c1 = std::sqrt(q);
    Matrix4 pure{};
    pure(0, 0) = c0 * c0;
    pure(0, 3) = pure(3, 0) = c0 * c1;
    pure(3, 3) = c1 * c1;
    pure = w * pure * adjoint(w);
    const Matrix4 rho = (1.0 - mu) * pure + (mu / 3.0) * (Matrix4::identity() - pure);
    std::vector<double> x = encode_state(pauli_coefficients(rho));
    for (double& v : x) v = std::clamp(v, -1.0, 1.0);
    return x;
  };
  double lo = 0.0, hi = std::min(r, 1.0 - r);
  if (!window_feasible(point(hi), temperature, cfg)) return purification_start(rng, temperature);
  for (int it = 0; it < 50; ++it) {
    const double mid = 0.5 * (lo + hi);
    (window_feasible(point(mid), temperature, cfg) ? hi : lo) = mid;
  }
  return point(hi);
}

/// Bloch components of a qubit operator.
inline std::array<double, 3> bloch_components(const Matrix2& m) {
  return {2.0 * m(0, 1).real(), -2.0 * m(0, 1).imag(), (m(0, 0) - m(1, 1)).real()};
}

/// Joint state U^dag (v (x) omega) U whose evolved probe is the pure state v,
/// with omega solved so the environment marginal is tau(T), then mixed with
/// 1/2 (x) tau(T) just enough to be valid over the window. Empty when no
/// environment state omega fits.
inline std::optional<std::vector<double>> pinned_probe_start(const Matrix4& u, const Matrix2& v, double temperature,
                                                             const StencilConfig& cfg) {
  auto omega = [](const std::array<double, 3>& w) {
    return 0.5 * (pauli::kI2 + w[0] * pauli::kX + w[1] * pauli::kY + w[2] * pauli::kZ);
  };
  auto marginal = [&](const std::array<double, 3>& w) {
    return bloch_components(partial_trace_probe(adjoint(u) * tensor(v, omega(w)) * u));
  };
  const std::array<double, 3> m0 = marginal({0.0, 0.0, 0.0});
  std::array<std::array<double, 3>, 3> a{};
  for (std::size_t j = 0; j < 3; ++j) {
    std::array<double, 3> e{};
    e[j] = 1.0;
    const std::array<double, 3> mj = marginal(e);
    for (std::size_t i = 0; i < 3; ++i) a[i][j] = mj[i] - m0[i];
  }
  const std::array<double, 3> rhs{-m0[0], -m0[1], thermal_bz(temperature) - m0[2]};
  auto det = [](const std::array<std::array<double, 3>, 3>& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  };
  const double d = det(a);
  if (std::abs(d) < 1e-12) return std::nullopt;
  std::array<double, 3> w{};
  for (std::size_t k = 0; k < 3; ++k) {
    auto ak = a;
    for (std::size_t i = 0; i < 3; ++i) ak[i][k] = rhs[i];
    w[k] = det(ak) / d;
  }
  if (w[0] * w[0] + w[1] * w[1] + w[2] * w[2] > 1.0) return std::nullopt;

  const Matrix4 pinned = adjoint(u) * tensor(v, omega(w)) * u;
  const Matrix4 product = tensor(0.5 * pauli::kI2, qubit_thermal_matrix(temperature));
  auto point = [&](double mu) {
    std::vector<double> x = encode_state(pauli_coefficients((1.0 - mu) * pinned + mu * product));
    for (double& c : x) c = std::clamp(c, -1.0, 1.0);
    return x;
  };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 50; ++it) {
    const double mid = 0.5 * (lo + hi);
    (window_feasible(point(mid), temperature, cfg) ? hi : lo) = mid;
  }
  return point(hi);
}

/// Restart starts for a fixed unitary: pinned_probe_start with a random pure
/// probe, or boundary_start when 64 draws find no fit.
inline std::function<std::vector<double>(Rng&, std::size_t)> pinned_probe_sampler(const Matrix4& u,
                                                                                   double temperature,
                                                                                   const StencilConfig& cfg) {
  return [=](Rng& rng, std::size_t) {
    for (int k = 0; k < 64; ++k) {
      const Matrix2 w = su2(draw::su2_params(rng));
      const Matrix2 v = w * bloch_matrix({0.0, 0.0, 1.0}) * adjoint(w);
      if (auto x = pinned_probe_start(u, v, temperature, cfg)) return *x;
    }
    return boundary_start(rng, temperature, cfg);
  };
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Decoded optimizer points

/// A parameter vector turned back into the objects it describes.
struct DecodedPoint {
  EncodingScenario scenario;
  Matrix4 unitary;
};

inline DecodedPoint decode_point(ProblemKind kind, UnitaryFamily family, std::span<const double> x,
                                 const ScenarioOptions& opt = {}) {
  const std::size_t nu = unitary_param_count(family);
  DecodedPoint out;
  out.scenario.family = family;
  if (is_fixed(family)) out.scenario.fixed = fixed_unitary(family);
  switch (kind) {
    case ProblemKind::cptp:
      out.unitary = decode_unitary(family, x.subspan(0, nu));
      out.scenario.kind = EncodingKind::cptp;
      out.scenario.initial = decode_bloch(x.subspan(nu));
      break;
    case ProblemKind::ncptp1:
      out.unitary = decode_unitary(family, x.subspan(0, nu));
      out.scenario.kind = EncodingKind::ncptp1;
      out.scenario.initial = decode_u1(x.subspan(nu));
      break;
    case ProblemKind::ncptp2:
      out.scenario.kind = EncodingKind::ncptp2;
      if (is_fixed(family)) {
        out.unitary = fixed_unitary(family);
        out.scenario.initial = decode_state(x);
      } else {
        if (!opt.state) throw std::invalid_argument("ncptp2 point needs the sampled state");
        out.unitary = decode_unitary(family, x);
        out.scenario.initial = *opt.state;
      }
      break;
    case ProblemKind::ncptp2_bound:
      out.unitary = Matrix4::identity();
      out.scenario.kind = EncodingKind::ncptp2;
      out.scenario.family = UnitaryFamily::general;
      out.scenario.fixed.reset();
      out.scenario.initial = decode_state(x);
      break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Problem construction

/// Optimization problem for one (kind, family) pair at temperature T.
///
/// Layouts (unitary parameters first):
///   cptp    general 15 + Bloch 3 | energy-conserving 5 + 3 | xx/xy Bloch 3
///   ncptp1  general 15 + U1 3    | energy-conserving 5 + 3 | xx/xy U1 3
///   ncptp2  general 15 | energy-conserving 5 (state fixed) | xx/xy state 12
///   ncptp2-bound        state 12, family ignored
inline OptimizationProblem scenario_problem(ProblemKind kind, UnitaryFamily family, double temperature,
                                            const ScenarioOptions& opt = {}) {
  validate(opt.stencil, temperature);
  OptimizationProblem prob;
  prob.name = std::string(to_string(kind)) + "/" + std::string(to_string(family));
  const std::size_t nu = unitary_param_count(family);
  const StencilConfig cfg = opt.stencil;
  const double penalty = opt.penalty;

  switch (kind) {
    case ProblemKind::cptp: {
      detail::unitary_box(family, prob.lower, prob.upper);
      detail::push_box(prob.lower, prob.upper, -1.0, 1.0, 3);
      const std::optional<Matrix4> fixed = is_fixed(family) ? std::optional(fixed_unitary(family)) : std::nullopt;
      prob.objective = [=](std::span<const double> x) {
        const Matrix4 u = fixed ? *fixed : decode_unitary(family, x.subspan(0, nu));
        const Matrix2 probe = bloch_matrix(decode_bloch(x.subspan(nu)));
        return qfi_stencil([&](double t) { return partial_trace_env(cptp_joint(probe, u, t)); }, temperature, cfg);
      };
      break;
    }
    case ProblemKind::ncptp1: {
      detail::unitary_box(family, prob.lower, prob.upper);
      detail::push_box(prob.lower, prob.upper, 0.0, kTwoPi, 3);
      const std::optional<Matrix4> fixed = is_fixed(family) ? std::optional(fixed_unitary(family)) : std::nullopt;
      prob.objective = [=](std::span<const double> x) {
        const Matrix4 u = fixed ? *fixed : decode_unitary(family, x.subspan(0, nu));
        const Matrix4 w = ncptp1_combined(local_u1(decode_u1(x.subspan(nu))), u);
        return qfi_stencil([&](double t) { return partial_trace_env(ncptp1_joint(w, t)); }, temperature, cfg);
      };
      break;
    }
    case ProblemKind::ncptp2: {
      if (is_fixed(family)) {
        detail::push_box(prob.lower, prob.upper, -1.0, 1.0, kStateParamCount);
        prob.penalty = penalty;
        const Matrix4 u = fixed_unitary(family);
        prob.draw_start = detail::pinned_probe_sampler(u, temperature, cfg);
        prob.objective = [=](std::span<const double> x) {
          const TwoQubitStateParams p = decode_state(x);
          const double m = stencil_min_eigenvalue(p, temperature, cfg);
          if (m < -kStateTolerance) return -penalty * std::abs(m);
          return qfi_stencil([&](double t) { return partial_trace_env(ncptp2_joint(p, u, t)); }, temperature,
                             cfg);
        };
      } else {
        if (!opt.state) throw std::invalid_argument("ncptp2 with a parametrized unitary needs a sampled state");
        require_stencil_positivity(*opt.state, temperature, cfg);
        detail::unitary_box(family, prob.lower, prob.upper);
        const TwoQubitStateParams p = *opt.state;
        prob.objective = [=](std::span<const double> x) {
          const Matrix4 u = decode_unitary(family, x);
          return qfi_stencil([&](double t) { return partial_trace_env(ncptp2_joint(p, u, t)); }, temperature,
                             cfg);
        };
      }
      break;
    }
    case ProblemKind::ncptp2_bound: {
      detail::push_box(prob.lower, prob.upper, -1.0, 1.0, kStateParamCount);
      prob.penalty = penalty;
      prob.draw_start = [=](Rng& rng, std::size_t) { return detail::near_pure_start(rng, temperature, cfg); };
      prob.objective = [=](std::span<const double> x) {
        const TwoQubitStateParams p = decode_state(x);
        const double m = stencil_min_eigenvalue(p, temperature, cfg);
        if (m < -kStateTolerance) return -penalty * std::abs(m);
        return qfi_stencil([&](double t) { return constrained_joint_matrix(p, t); }, temperature, cfg);
      };
      break;
    }
  }
  prob.dimension = prob.lower.size();
  return prob;
}

}  // namespace qthermo
