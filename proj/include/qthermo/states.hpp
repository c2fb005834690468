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
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include "qthermo/linalg.hpp"
#include "qthermo/random.hpp"

namespace qthermo {

inline constexpr double kStateTolerance = 1e-10;

class InvalidStateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an assembled state has an eigenvalue below -1e-10.
class PositivityError : public InvalidStateError {
 public:
  explicit PositivityError(double min_eigenvalue)
      : InvalidStateError("state is not positive semidefinite (min eigenvalue " +
                          std::to_string(min_eigenvalue) + ")"),
        min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

/// Hermitian, unit-trace, positive semidefinite operator. The stored matrix
/// is exactly what was passed in; validation never rewrites it.
template <std::size_t N>
class DensityMatrix {
 public:
  explicit DensityMatrix(const Matrix<N>& m) : mat_(m) {
    const double herm = hermiticity_deviation(m);
    if (!(herm <= kStateTolerance)) {
      throw InvalidStateError("density matrix not Hermitian (deviation " + std::to_string(herm) + ")");
    }
    const Complex tr = trace(m);
    if (!(std::abs(tr - 1.0) <= kStateTolerance)) {
      throw InvalidStateError("density matrix trace " + std::to_string(tr.real()) + " != 1");
    }
    min_eigenvalue_ = qthermo::min_eigenvalue(m);
    if (min_eigenvalue_ < -kStateTolerance) throw PositivityError(min_eigenvalue_);
  }

  const Matrix<N>& matrix() const noexcept { return mat_; }
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  Matrix<N> mat_;
  double min_eigenvalue_ = 0.0;
};

inline void require_positive_temperature(double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw std::domain_error("temperature must be positive and finite, got " + std::to_string(temperature));
  }
}

// ---------------------------------------------------------------------------
// Thermal states

/// sigma_z (x) 1 + 1 (x) sigma_z
inline const Matrix4& total_hamiltonian() {
  static const Matrix4 h = tensor(pauli::kZ, pauli::kI2) + tensor(pauli::kI2, pauli::kZ);
  return h;
}

namespace detail {
template <std::size_t N>
Matrix<N> default_hamiltonian() {
  static_assert(N == 2 || N == 4, "no default Hamiltonian for this dimension");
  if constexpr (N == 2) {
    return pauli::kZ;
  } else {
    return total_hamiltonian();
  }
}
}  // namespace detail

/// Temperature plus Hamiltonian of the system being thermalized. Units have
/// hbar = k_B = 1, so T is measured in units of the level spacing scale.
template <std::size_t N = 2>
struct ThermalSpec {
  double temperature = 1.0;
  Matrix<N> hamiltonian = detail::default_hamiltonian<N>();
};

/// exp(-H/T) / Tr exp(-H/T)
template <std::size_t N>
DensityMatrix<N> thermal_state(const ThermalSpec<N>& spec) {
  require_positive_temperature(spec.temperature);
  const auto ed = eig_hermitian(spec.hamiltonian);
  const double ground = ed.eigenvalues[0];
  double z = 0.0;
  for (double e : ed.eigenvalues) z += std::exp(-(e - ground) / spec.temperature);
  return DensityMatrix<N>(apply_spectral(ed, [&](double e) {
    return Complex{std::exp(-(e - ground) / spec.temperature) / z, 0.0};
  }));
}

/// Population of |1> (energy -1) in the sigma_z thermal state.
inline double r_coefficient(double temperature) {
  require_positive_temperature(temperature);
  return 1.0 / (1.0 + std::exp(-2.0 / temperature));
}

/// Analytic d r / d T.
inline double dr_dT(double temperature) {
  require_positive_temperature(temperature);
  const double e = std::exp(-2.0 / temperature);
  return -(2.0 / (temperature * temperature)) * e / ((1.0 + e) * (1.0 + e));
}

/// diag(1 - r, r) without going through the eigensolver. Hot-path version
/// of thermal_state for the sigma_z qubit.
inline Matrix2 qubit_thermal_matrix(double temperature) {
  require_positive_temperature(temperature);
  const double excited = 1.0 / (1.0 + std::exp(2.0 / temperature));
  return Matrix2::diagonal({excited, 1.0 - excited});
}

/// diag(-dr/dT, dr/dT)
inline Matrix2 qubit_thermal_derivative(double temperature) {
  const double d = dr_dT(temperature);
  return Matrix2::diagonal({-d, d});
}

// ---------------------------------------------------------------------------
// Bloch states

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

inline void validate(const BlochVector& v) {
  if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z)) {
    throw std::invalid_argument("Bloch vector has non-finite component");
  }
  if (v.x * v.x + v.y * v.y + v.z * v.z > 1.0 + 1e-12) {
    throw std::invalid_argument("Bloch vector norm " + std::to_string(v.norm()) + " exceeds 1");
  }
}

/// Rescale onto the unit sphere if outside the ball; identity otherwise.
inline BlochVector project_to_ball(BlochVector v) {
  const double n = v.norm();
  if (n > 1.0) {
    v.x /= n;
    v.y /= n;
    v.z /= n;
  }
  return v;
}

inline Matrix2 bloch_matrix(const BlochVector& v) {
  return 0.5 * (pauli::kI2 + v.x * pauli::kX + v.y * pauli::kY + v.z * pauli::kZ);
}

/// (1 + n . sigma) / 2
inline DensityMatrix<2> bloch_state(const BlochVector& v) {
  validate(v);
  return DensityMatrix<2>(bloch_matrix(v));
}

// ---------------------------------------------------------------------------
// Purification

/// sqrt(1 - r)|00> + sqrt(r)|11>
inline std::array<Complex, 4> purification_vector(double temperature) {
  require_positive_temperature(temperature);
  const double excited = 1.0 / (1.0 + std::exp(2.0 / temperature));
  return {std::sqrt(excited), 0.0, 0.0, std::sqrt(1.0 - excited)};
}

inline Matrix4 projector(const std::array<Complex, 4>& psi) {
  Matrix4 out;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) out(i, j) = psi[i] * std::conj(psi[j]);
  return out;
}

inline DensityMatrix<4> purification(double temperature) {
  return DensityMatrix<4>(projector(purification_vector(temperature)));
}

// ---------------------------------------------------------------------------
// General two-qubit states with a thermal environment marginal

/// Pauli-basis coefficients of a two-qubit state:
/// (1 + a.sigma (x) 1 + 1 (x) b.sigma + sum c_ij sigma_i (x) sigma_j) / 4
struct TwoQubitStateParams {
  std::array<double, 3> a{};
  std::array<double, 3> b{};
  std::array<std::array<double, 3>, 3> c{};

  friend bool operator==(const TwoQubitStateParams&, const TwoQubitStateParams&) = default;
};

inline void validate(const TwoQubitStateParams& p) {
  auto check = [](double v) {
    if (!(v >= -1.0 && v <= 1.0)) {
      throw std::invalid_argument("two-qubit state coefficient " + std::to_string(v) + " outside [-1, 1]");
    }
  };
  for (double v : p.a) check(v);
  for (double v : p.b) check(v);
  for (const auto& row : p.c)
    for (double v : row) check(v);
}

namespace detail {
struct PauliProducts {
  std::array<Matrix4, 3> s_i;                    // sigma_i (x) 1
  std::array<Matrix4, 3> i_s;                    // 1 (x) sigma_j
  std::array<std::array<Matrix4, 3>, 3> s_s;     // sigma_i (x) sigma_j
};

inline const PauliProducts& pauli_products() {
  static const PauliProducts table = [] {
    PauliProducts t;
    for (std::size_t i = 0; i < 3; ++i) {
      t.s_i[i] = tensor(pauli::kXYZ[i], pauli::kI2);
      t.i_s[i] = tensor(pauli::kI2, pauli::kXYZ[i]);
      for (std::size_t j = 0; j < 3; ++j) t.s_s[i][j] = tensor(pauli::kXYZ[i], pauli::kXYZ[j]);
    }
    return t;
  }();
  return table;
}
}  // namespace detail

/// Assemble the Pauli expansion as written. No positivity check.
inline Matrix4 assemble_two_qubit_matrix(const TwoQubitStateParams& p) {
  const auto& t = detail::pauli_products();
  Matrix4 m = Matrix4::identity();
  for (std::size_t i = 0; i < 3; ++i) {
    if (p.a[i] != 0.0) m += p.a[i] * t.s_i[i];
    if (p.b[i] != 0.0) m += p.b[i] * t.i_s[i];
    for (std::size_t j = 0; j < 3; ++j)
      if (p.c[i][j] != 0.0) m += p.c[i][j] * t.s_s[i][j];
  }
  return 0.25 * m;
}

/// Pauli coefficients tr(rho sigma_i (x) sigma_j) of a two-qubit matrix.
inline TwoQubitStateParams pauli_coefficients(const Matrix4& m) {
  const auto& t = detail::pauli_products();
  TwoQubitStateParams p;
  for (std::size_t i = 0; i < 3; ++i) {
    p.a[i] = trace(m * t.s_i[i]).real();
    p.b[i] = trace(m * t.i_s[i]).real();
    for (std::size_t j = 0; j < 3; ++j) p.c[i][j] = trace(m * t.s_s[i][j]).real();
  }
  return p;
}

/// Environment Bloch z-component that makes Tr_S rho equal the thermal state.
inline double thermal_bz(double temperature) { return 1.0 - 2.0 * r_coefficient(temperature); }

/// params with b forced to (0, 0, 1 - 2 r(T)).
inline TwoQubitStateParams with_thermal_marginal(TwoQubitStateParams p, double temperature) {
  p.b = {0.0, 0.0, thermal_bz(temperature)};
  return p;
}

/// Unchecked joint matrix with thermal environment marginal at T.
inline Matrix4 constrained_joint_matrix(const TwoQubitStateParams& p, double temperature) {
  return assemble_two_qubit_matrix(with_thermal_marginal(p, temperature));
}

/// Joint state whose environment marginal is thermal at T. a and C are taken
/// as given (temperature independent); b_x and b_y are ignored. Throws
/// PositivityError when the assembled matrix is not a state.
inline DensityMatrix<4> constrained_two_qubit_state(const TwoQubitStateParams& p, double temperature) {
  TwoQubitStateParams free = p;
  free.b = {};
  validate(free);
  return DensityMatrix<4>(constrained_joint_matrix(p, temperature));
}

// ---------------------------------------------------------------------------
// Rejection sampling of constrained states

/// Temperatures a sampled state must be valid at: [t_lo - 2h, t_hi + 2h].
/// The joint matrix is affine in b_z and b_z is monotone in T, so positivity
/// at the two ends implies positivity on the whole interval.
struct SamplingWindow {
  double t_lo = 1.0;
  double t_hi = 1.0;
  double h = 0.001;
};

struct SampledState {
  TwoQubitStateParams params;
  std::uint64_t draws = 0;  // cube draws consumed, including the accepted one
};

/// Acceptance in the uniform cube is of order 1e-7, so the cap sits well
/// above the expected ~1e7 draws per accepted state.
inline constexpr std::uint64_t kDefaultMaxSamplerDraws = 2'000'000'000ULL;

class SamplerExhaustedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

// Necessary conditions first (diagonal entries, then 2x2 principal minors),
// full eigensolve only for survivors. Every early exit rejects a matrix the
// eigensolver would also reject, so the accepted distribution is unchanged.
inline bool positive_with_tolerance(const Matrix4& m) {
  for (std::size_t i = 0; i < 4; ++i)
    if (m(i, i).real() < -kStateTolerance) return false;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) {
      const double d1 = m(i, i).real();
      const double d2 = m(j, j).real();
      const double half = 0.5 * (d1 - d2);
      const double lo = 0.5 * (d1 + d2) - std::sqrt(half * half + std::norm(m(i, j)));
      if (lo < -kStateTolerance) return false;
    }
  return min_eigenvalue(m) >= -kStateTolerance;
}

inline bool diagonal_ok(double az, double czz, double bz) {
  for (double zs : {1.0, -1.0})
    for (double ze : {1.0, -1.0})
      if (0.25 * (1.0 + az * zs + bz * ze + czz * zs * ze) < -kStateTolerance) return false;
  return true;
}

// Same matrix as assemble_two_qubit_matrix with b = (0, 0, bz), written as
// 1 (x) (1 + bz sigma_z) + (a.sigma) (x) 1 + sum_i sigma_i (x) (sum_j c_ij sigma_j).
inline Matrix4 joint_matrix_fast(const TwoQubitStateParams& p, double bz) {
  auto pauli_combo = [](double x, double y, double z) {
    return Matrix2{Complex{z, 0.0}, Complex{x, -y}, Complex{x, y}, Complex{-z, 0.0}};
  };
  Matrix2 env = Matrix2::diagonal({1.0 + bz, 1.0 - bz});
  Matrix4 m = tensor(pauli::kI2, env);
  const Matrix2 a = pauli_combo(p.a[0], p.a[1], p.a[2]);
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t t = 0; t < 2; ++t)
      for (std::size_t e = 0; e < 2; ++e) m(2 * s + e, 2 * t + e) += a(s, t);
  for (std::size_t i = 0; i < 3; ++i) {
    const Matrix2 k = pauli_combo(p.c[i][0], p.c[i][1], p.c[i][2]);
    const Matrix2& sigma = pauli::kXYZ[i];
    for (std::size_t s = 0; s < 2; ++s)
      for (std::size_t t = 0; t < 2; ++t) {
        const Complex st = sigma(s, t);
        if (st == Complex{}) continue;
        for (std::size_t e = 0; e < 2; ++e)
          for (std::size_t f = 0; f < 2; ++f) m(2 * s + e, 2 * t + f) += st * k(e, f);
      }
  }
  return 0.25 * m;
}

}  // namespace detail

/// Draw (a, C) uniformly from [-1, 1]^12 until the constrained joint state is
/// positive over the whole sampling window. Deterministic in the seed.
inline SampledState sample_constrained_state(std::uint64_t seed, const SamplingWindow& window,
                                             std::uint64_t max_draws = kDefaultMaxSamplerDraws) {
  if (!(window.h > 0.0) || !(window.t_lo <= window.t_hi)) {
    throw std::invalid_argument("invalid sampling window");
  }
  const double t_cold = window.t_lo - 2.0 * window.h;
  const double t_hot = window.t_hi + 2.0 * window.h;
  require_positive_temperature(t_cold);
  const double bz_cold = thermal_bz(t_cold);
  const double bz_hot = thermal_bz(t_hot);

  Rng rng(seed);
  SampledState out;
  TwoQubitStateParams& p = out.params;
  for (std::uint64_t draw = 1; draw <= max_draws; ++draw) {
    // a_z and c_zz alone fix the diagonal; the other ten components are only
    // drawn once the diagonal test passes.
    p.a[2] = rng.uniform(-1.0, 1.0);
    p.c[2][2] = rng.uniform(-1.0, 1.0);
    if (!detail::diagonal_ok(p.a[2], p.c[2][2], bz_cold) || !detail::diagonal_ok(p.a[2], p.c[2][2], bz_hot)) {
      continue;
    }
    p.a[0] = rng.uniform(-1.0, 1.0);
    p.a[1] = rng.uniform(-1.0, 1.0);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        if (i != 2 || j != 2) p.c[i][j] = rng.uniform(-1.0, 1.0);
    if (!detail::positive_with_tolerance(detail::joint_matrix_fast(p, bz_cold))) continue;
    if (!detail::positive_with_tolerance(detail::joint_matrix_fast(p, bz_hot))) continue;
    out.draws = draw;
    return out;
  }
  throw SamplerExhaustedError("constrained-state sampler gave up after " + std::to_string(max_draws) +
                              " draws");
}

/// Single-temperature form: valid at T and T +- h, T +- 2h.
inline SampledState sample_constrained_state(std::uint64_t seed, double temperature, double h = 0.001,
                                             std::uint64_t max_draws = kDefaultMaxSamplerDraws) {
  return sample_constrained_state(seed, SamplingWindow{temperature, temperature, h}, max_draws);
}

}  // namespace qthermo
