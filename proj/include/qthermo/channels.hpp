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

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "qthermo/fisher.hpp"
#include "qthermo/linalg.hpp"
#include "qthermo/states.hpp"
#include "qthermo/unitaries.hpp"

namespace qthermo {

/// How the temperature reaches the probe.
///  - cptp: probe starts uncorrelated, rho_S (x) tau_E.
///  - ncptp1: probe and environment start in the thermal purification, with a
///    local rotation U1 on the probe half.
///  - ncptp2: arbitrary correlated joint state with a thermal environment
///    marginal.
enum class EncodingKind { cptp, ncptp1, ncptp2 };

enum class UnitaryFamily { general, energy_conserving, xx, xy };

inline std::string_view to_string(EncodingKind k) {
  switch (k) {
    case EncodingKind::cptp: return "cptp";
    case EncodingKind::ncptp1: return "ncptp1";
    case EncodingKind::ncptp2: return "ncptp2";
  }
  return "?";
}

inline std::string_view to_string(UnitaryFamily f) {
  switch (f) {
    case UnitaryFamily::general: return "general";
    case UnitaryFamily::energy_conserving: return "energy-conserving";
    case UnitaryFamily::xx: return "xx";
    case UnitaryFamily::xy: return "xy";
  }
  return "?";
}

inline UnitaryFamily parse_unitary_family(std::string_view s) {
  if (s == "general") return UnitaryFamily::general;
  if (s == "energy-conserving" || s == "ec") return UnitaryFamily::energy_conserving;
  if (s == "xx") return UnitaryFamily::xx;
  if (s == "xy") return UnitaryFamily::xy;
  throw std::invalid_argument("unknown unitary family '" + std::string(s) + "'");
}

/// Fixed-unitary families have no unitary parameters to optimize.
inline bool is_fixed(UnitaryFamily f) { return f == UnitaryFamily::xx || f == UnitaryFamily::xy; }

inline Matrix4 fixed_unitary(UnitaryFamily f) {
  switch (f) {
    case UnitaryFamily::xx: return xy_unitary(kXxModel);
    case UnitaryFamily::xy: return xy_unitary(kAnisotropicXyModel);
    default: throw std::invalid_argument("unitary family has no fixed unitary");
  }
}

class NotUnitaryError : public std::invalid_argument {
 public:
  explicit NotUnitaryError(double deviation)
      : std::invalid_argument("matrix is not unitary (max |U U^H - 1| = " + std::to_string(deviation) + ")") {}
};

inline void require_unitary(const Matrix4& u) {
  const double dev = unitarity_deviation(u);
  if (!(dev <= 1e-10)) throw NotUnitaryError(dev);
}

// ---------------------------------------------------------------------------
// Unchecked kernels. These are what the optimizer calls; they assume a valid
// unitary and leave positivity to the caller.

/// U (rho_S (x) tau_E(T)) U^H
inline Matrix4 cptp_joint(const Matrix2& probe, const Matrix4& u, double temperature) {
  return u * tensor(probe, qubit_thermal_matrix(temperature)) * adjoint(u);
}

/// W |Psi(T)> <Psi(T)| W^H where W = U (U1 (x) 1).
inline Matrix4 ncptp1_joint(const Matrix4& combined, double temperature) {
  const auto psi = purification_vector(temperature);
  std::array<Complex, 4> out{};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t k = 0; k < 4; ++k) out[i] += combined(i, k) * psi[k];
  return projector(out);
}

inline Matrix4 ncptp1_combined(const Matrix2& u1, const Matrix4& u) { return u * tensor(u1, pauli::kI2); }

/// U rho_SE(T) U^H with rho_SE carrying the thermal environment marginal.
inline Matrix4 ncptp2_joint(const TwoQubitStateParams& p, const Matrix4& u, double temperature) {
  return u * constrained_joint_matrix(p, temperature) * adjoint(u);
}

// ---------------------------------------------------------------------------
// Checked encoders

inline DensityMatrix<4> joint_evolved_cptp(const DensityMatrix<2>& probe, const Matrix4& u, double temperature) {
  require_unitary(u);
  require_positive_temperature(temperature);
  return DensityMatrix<4>(cptp_joint(probe.matrix(), u, temperature));
}

/// Tr_E[U (rho_S (x) tau_E(T)) U^H]
inline DensityMatrix<2> encode_cptp(const DensityMatrix<2>& probe, const Matrix4& u, double temperature) {
  return DensityMatrix<2>(partial_trace_env(joint_evolved_cptp(probe, u, temperature).matrix()));
}

inline DensityMatrix<4> joint_evolved_ncptp1(const LocalU1Params& u1, const Matrix4& u, double temperature) {
  require_unitary(u);
  require_positive_temperature(temperature);
  return DensityMatrix<4>(ncptp1_joint(ncptp1_combined(local_u1(u1), u), temperature));
}

/// Tr_E[U (U1 (x) 1) |Psi><Psi| (U1^H (x) 1) U^H] with |Psi> the thermal purification.
inline DensityMatrix<2> encode_ncptp1(const LocalU1Params& u1, const Matrix4& u, double temperature) {
  return DensityMatrix<2>(partial_trace_env(joint_evolved_ncptp1(u1, u, temperature).matrix()));
}

/// Throws PositivityError unless the constrained joint state is valid at T
/// and at every stencil offset T +- h, T +- 2h.
inline void require_stencil_positivity(const TwoQubitStateParams& p, double temperature,
                                       const StencilConfig& cfg = {}) {
  validate(cfg, temperature);
  for (double offset : {0.0, -2.0 * cfg.h, -cfg.h, cfg.h, 2.0 * cfg.h}) {
    const double m = min_eigenvalue(constrained_joint_matrix(p, temperature + offset));
    if (m < -kStateTolerance) throw PositivityError(m);
  }
}

inline DensityMatrix<4> joint_evolved_ncptp2(const TwoQubitStateParams& p, const Matrix4& u, double temperature,
                                             const StencilConfig& cfg = {}) {
  require_unitary(u);
  require_stencil_positivity(p, temperature, cfg);
  return DensityMatrix<4>(ncptp2_joint(p, u, temperature));
}

/// Tr_E[U rho_SE(T) U^H]
inline DensityMatrix<2> encode_ncptp2(const TwoQubitStateParams& p, const Matrix4& u, double temperature,
                                      const StencilConfig& cfg = {}) {
  return DensityMatrix<2>(partial_trace_env(joint_evolved_ncptp2(p, u, temperature, cfg).matrix()));
}

// ---------------------------------------------------------------------------
// Scenario bundle

/// Everything except the temperature needed to produce rho_S(T). Exactly one
/// kind of initial data is held, matching `kind`.
struct EncodingScenario {
  EncodingKind kind = EncodingKind::cptp;
  UnitaryFamily family = UnitaryFamily::general;
  std::optional<Matrix4> fixed;  // set for the xx / xy families
  std::variant<BlochVector, LocalU1Params, TwoQubitStateParams> initial;
};

inline void validate(const EncodingScenario& s) {
  const bool ok = (s.kind == EncodingKind::cptp && std::holds_alternative<BlochVector>(s.initial)) ||
                  (s.kind == EncodingKind::ncptp1 && std::holds_alternative<LocalU1Params>(s.initial)) ||
                  (s.kind == EncodingKind::ncptp2 && std::holds_alternative<TwoQubitStateParams>(s.initial));
  if (!ok) throw std::invalid_argument("scenario initial data does not match its encoding kind");
  if (is_fixed(s.family) != s.fixed.has_value()) {
    throw std::invalid_argument("fixed unitary must be set exactly for the xx / xy families");
  }
}

inline DensityMatrix<4> joint_evolved_state(const EncodingScenario& s, const Matrix4& u, double temperature,
                                            const StencilConfig& cfg = {}) {
  validate(s);
  switch (s.kind) {
    case EncodingKind::cptp:
      return joint_evolved_cptp(bloch_state(std::get<BlochVector>(s.initial)), u, temperature);
    case EncodingKind::ncptp1:
      return joint_evolved_ncptp1(std::get<LocalU1Params>(s.initial), u, temperature);
    case EncodingKind::ncptp2:
      return joint_evolved_ncptp2(std::get<TwoQubitStateParams>(s.initial), u, temperature, cfg);
  }
  throw std::logic_error("unreachable");
}

inline DensityMatrix<2> encode(const EncodingScenario& s, const Matrix4& u, double temperature,
                               const StencilConfig& cfg = {}) {
  return DensityMatrix<2>(partial_trace_env(joint_evolved_state(s, u, temperature, cfg).matrix()));
}

/// Uses the scenario's own fixed unitary (xx / xy families).
inline DensityMatrix<2> encode(const EncodingScenario& s, double temperature, const StencilConfig& cfg = {}) {
  if (!s.fixed) throw std::invalid_argument("scenario has no fixed unitary");
  return encode(s, *s.fixed, temperature, cfg);
}

}  // namespace qthermo
