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
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qthermo/linalg.hpp"
#include "qthermo/states.hpp"

namespace qthermo {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

class ParameterRangeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {
inline void check_closed(const char* name, double v, double lo, double hi) {
  if (!(v >= lo && v <= hi)) {
    throw ParameterRangeError(std::string(name) + " = " + std::to_string(v) + " outside [" +
                              std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}
inline void check_half_open(const char* name, double v, double lo, double hi) {
  if (!(v >= lo && v < hi)) {
    throw ParameterRangeError(std::string(name) + " = " + std::to_string(v) + " outside [" +
                              std::to_string(lo) + ", " + std::to_string(hi) + ")");
  }
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Single-qubit factors

/// theta in [0, pi], nu in [0, 2 pi], psi in [0, 4 pi).
struct Su2Params {
  double theta = 0.0;
  double nu = 0.0;
  double psi = 0.0;
};

inline Matrix2 su2(const Su2Params& p) {
  detail::check_closed("theta", p.theta, 0.0, kPi);
  detail::check_closed("nu", p.nu, 0.0, kTwoPi);
  detail::check_half_open("psi", p.psi, 0.0, 2.0 * kTwoPi);
  const double c = std::cos(0.5 * p.theta);
  const double s = std::sin(0.5 * p.theta);
  const double sum = 0.5 * (p.psi + p.nu);
  const double diff = 0.5 * (p.psi - p.nu);
  return Matrix2{c * std::exp(kI * sum), s * std::exp(-kI * diff),  //
                 -s * std::exp(kI * diff), c * std::exp(-kI * sum)};
}

/// Local rotation applied to the probe half of the purification.
/// beta, gamma, delta in [0, 2 pi].
struct LocalU1Params {
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
};

inline Matrix2 local_u1(const LocalU1Params& p) {
  detail::check_closed("beta", p.beta, 0.0, kTwoPi);
  detail::check_closed("gamma", p.gamma, 0.0, kTwoPi);
  detail::check_closed("delta", p.delta, 0.0, kTwoPi);
  const double c = std::cos(p.gamma);
  const double s = std::sin(p.gamma);
  return Matrix2{std::exp(kI * p.delta) * c, std::exp(kI * p.beta) * s,  //
                 -std::exp(-kI * p.beta) * s, std::exp(-kI * p.delta) * c};
}

// ---------------------------------------------------------------------------
// General two-qubit unitaries (local SU(2) x nonlocal core x local SU(2))

struct KrausCiracParams {
  std::array<Su2Params, 4> w{};  // W1 (x) W2 after the core, W3 (x) W4 before it
  double alpha_x = 0.0;          // each in [0, pi/2]
  double alpha_y = 0.0;
  double alpha_z = 0.0;
};

/// cos(alpha) 1 - i sin(alpha) sigma (x) sigma
inline Matrix4 pauli_pair_rotation(const Matrix2& sigma, double alpha) {
  return std::cos(alpha) * Matrix4::identity() - kI * std::sin(alpha) * tensor(sigma, sigma);
}

/// exp(-i (ax XX + ay YY + az ZZ)) as a product of three commuting factors.
inline Matrix4 nonlocal_core(double alpha_x, double alpha_y, double alpha_z) {
  return pauli_pair_rotation(pauli::kX, alpha_x) * pauli_pair_rotation(pauli::kY, alpha_y) *
         pauli_pair_rotation(pauli::kZ, alpha_z);
}

/// Reference path for nonlocal_core through the generic eigensolver.
inline Matrix4 nonlocal_core_reference(double alpha_x, double alpha_y, double alpha_z) {
  const Matrix4 generator = alpha_x * tensor(pauli::kX, pauli::kX) + alpha_y * tensor(pauli::kY, pauli::kY) +
                            alpha_z * tensor(pauli::kZ, pauli::kZ);
  return exp_minus_i_hermitian(generator);
}

inline Matrix4 kraus_cirac(const KrausCiracParams& p) {
  detail::check_closed("alpha_x", p.alpha_x, 0.0, 0.5 * kPi);
  detail::check_closed("alpha_y", p.alpha_y, 0.0, 0.5 * kPi);
  detail::check_closed("alpha_z", p.alpha_z, 0.0, 0.5 * kPi);
  const Matrix4 outer = tensor(su2(p.w[0]), su2(p.w[1]));
  const Matrix4 inner = tensor(su2(p.w[2]), su2(p.w[3]));
  return outer * nonlocal_core(p.alpha_x, p.alpha_y, p.alpha_z) * inner;
}

// ---------------------------------------------------------------------------
// Energy-conserving unitaries

/// Phases lambda1..lambda4 on |00>, |Phi1>, |Phi2>, |11> and the mixing angle
/// lambda5 of the degenerate {|01>, |10>} block. All in [0, 2 pi].
struct EnergyConservingParams {
  std::array<double, 5> lambda{};
};

inline Matrix4 energy_conserving(const EnergyConservingParams& p) {
  for (double l : p.lambda) detail::check_closed("lambda", l, 0.0, kTwoPi);
  const double s = std::sin(p.lambda[4]);
  const double c = std::cos(p.lambda[4]);
  const Complex e2 = std::exp(-kI * p.lambda[1]);
  const Complex e3 = std::exp(-kI * p.lambda[2]);
  // Phi1 = c|01> + s|10>, Phi2 = -s|01> + c|10>; indices |01> = 1, |10> = 2.
  Matrix4 u;
  u(0, 0) = std::exp(-kI * p.lambda[0]);
  u(3, 3) = std::exp(-kI * p.lambda[3]);
  u(1, 1) = e2 * c * c + e3 * s * s;
  u(2, 2) = e2 * s * s + e3 * c * c;
  u(1, 2) = (e2 - e3) * c * s;
  u(2, 1) = u(1, 2);
  return u;
}

/// SWAP up to the phases a on |00>, b on the exchanged pair, c on |11>.
inline Matrix4 swap_like(double a, double b, double c) {
  Matrix4 u;
  u(0, 0) = std::exp(kI * a);
  u(1, 2) = std::exp(kI * b);
  u(2, 1) = std::exp(kI * b);
  u(3, 3) = std::exp(kI * c);
  return u;
}

inline Matrix4 swap_gate() { return swap_like(0.0, 0.0, 0.0); }

// ---------------------------------------------------------------------------
// XY-model interaction unitaries

/// H_int = j_x XX + j_y YY. j_x == j_y is the XX model.
struct XyModelParams {
  double j_x = 0.5;
  double j_y = 0.5;
};

inline constexpr XyModelParams kXxModel{0.5, 0.5};
inline constexpr XyModelParams kAnisotropicXyModel{1.0, 0.5};

/// exp(-i (H_T + H_int))
inline Matrix4 xy_unitary(const XyModelParams& p) {
  if (!std::isfinite(p.j_x) || !std::isfinite(p.j_y)) {
    throw ParameterRangeError("XY couplings must be finite");
  }
  const Matrix4 h = total_hamiltonian() + p.j_x * tensor(pauli::kX, pauli::kX) +
                    p.j_y * tensor(pauli::kY, pauli::kY);
  return exp_minus_i_hermitian(h);
}

}  // namespace qthermo
