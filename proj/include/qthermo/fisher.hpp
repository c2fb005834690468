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

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "qthermo/linalg.hpp"
#include "qthermo/states.hpp"

namespace qthermo {

/// Step of the five-point central difference in temperature.
struct StencilConfig {
  double h = 0.001;
};

inline void validate(const StencilConfig& cfg, double temperature) {
  if (!(cfg.h > 0.0) || !std::isfinite(cfg.h)) {
    throw std::invalid_argument("stencil step must be positive, got " + std::to_string(cfg.h));
  }
  if (!(temperature - 2.0 * cfg.h > 0.0)) {
    throw std::domain_error("stencil reaches non-positive temperature: T = " + std::to_string(temperature) +
                            ", h = " + std::to_string(cfg.h));
  }
}

class StencilError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
template <class Fn>
using stencil_result_t = std::remove_cvref_t<std::invoke_result_t<Fn&, double>>;

template <class T>
struct matrix_of {
  using type = T;
  static const T& get(const T& m) { return m; }
};
template <std::size_t N>
struct matrix_of<DensityMatrix<N>> {
  using type = Matrix<N>;
  static const Matrix<N>& get(const DensityMatrix<N>& d) { return d.matrix(); }
};
}  // namespace detail

/// d rho / dT ~ [rho(T-2h) - 8 rho(T-h) + 8 rho(T+h) - rho(T+2h)] / 12h.
///
/// state_fn maps a temperature to a Matrix<N> or DensityMatrix<N>. A throw
/// from any of the four evaluations is rethrown as StencilError naming the
/// offending temperature.
template <class Fn>
auto state_derivative_stencil(Fn&& state_fn, double temperature, const StencilConfig& cfg = {}) {
  using Result = detail::stencil_result_t<Fn>;
  using Traits = detail::matrix_of<Result>;
  using Mat = typename Traits::type;
  validate(cfg, temperature);

  constexpr double kWeights[4] = {1.0, -8.0, 8.0, -1.0};
  const double offsets[4] = {-2.0 * cfg.h, -cfg.h, cfg.h, 2.0 * cfg.h};
  Mat out;
  for (int k = 0; k < 4; ++k) {
    const double t = temperature + offsets[k];
    try {
      out += kWeights[k] * Traits::get(state_fn(t));
    } catch (const std::exception& e) {
      throw StencilError("stencil evaluation at T = " + std::to_string(t) + " failed: " + e.what());
    }
  }
  return out * (1.0 / (12.0 * cfg.h));
}

inline constexpr double kQfiPairThreshold = 1e-10;
inline constexpr double kDerivativeTolerance = 1e-8;

struct QfiDetail {
  double value = 0.0;
  std::size_t excluded_pairs = 0;  // (i, j) with lambda_i + lambda_j <= threshold
  double min_eigenvalue = 0.0;
};

/// F = 2 sum_{lambda_i + lambda_j > threshold} |<i| d rho |j>|^2 / (lambda_i + lambda_j)
///
/// No state validation beyond what the eigensolver enforces; callers that
/// need the positivity gate read min_eigenvalue off the result.
template <std::size_t N>
QfiDetail qfi_detail(const Matrix<N>& rho, const Matrix<N>& deriv, double threshold = kQfiPairThreshold) {
  const double dev = hermiticity_deviation(deriv);
  if (!(dev <= kDerivativeTolerance)) {
    throw NotHermitianError(dev);
  }
  const auto ed = eig_hermitian(rho);
  const Matrix<N>& v = ed.eigenvectors;
  const Matrix<N> rotated = adjoint(v) * deriv * v;

  QfiDetail out;
  out.min_eigenvalue = ed.eigenvalues[0];
  double sum = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < N; ++j) {
      const double denom = ed.eigenvalues[i] + ed.eigenvalues[j];
      if (denom <= threshold) {
        ++out.excluded_pairs;
        continue;
      }
      sum += std::norm(rotated(i, j)) / denom;
    }
  }
  out.value = 2.0 * sum;
  return out;
}

template <std::size_t N>
double qfi(const DensityMatrix<N>& state, const Matrix<N>& deriv) {
  if (!(std::abs(trace(deriv)) <= kDerivativeTolerance)) {
    throw std::invalid_argument("state derivative is not traceless (trace " +
                                std::to_string(std::abs(trace(deriv))) + ")");
  }
  return qfi_detail(state.matrix(), deriv).value;
}

/// QFI of a state family at T using the five-point stencil for d rho / dT.
template <class Fn>
double qfi_stencil(Fn&& state_fn, double temperature, const StencilConfig& cfg = {}) {
  const auto deriv = state_derivative_stencil(state_fn, temperature, cfg);
  const auto& rho = state_fn(temperature);
  using Traits = detail::matrix_of<std::remove_cvref_t<decltype(rho)>>;
  return qfi_detail(Traits::get(rho), deriv).value;
}

// ---------------------------------------------------------------------------
// Closed forms for diagonal, temperature-dependent spectra

/// Probabilities and their temperature derivatives.
struct SpectrumDerivative {
  std::vector<double> p;
  std::vector<double> p_dot;
};

inline void validate(const SpectrumDerivative& sd) {
  if (sd.p.size() != sd.p_dot.size() || sd.p.empty()) {
    throw std::invalid_argument("spectrum and derivative must be non-empty and the same length");
  }
  double total = 0.0;
  double total_dot = 0.0;
  for (std::size_t i = 0; i < sd.p.size(); ++i) {
    if (!(sd.p[i] >= 0.0)) throw std::invalid_argument("negative probability in spectrum");
    total += sd.p[i];
    total_dot += sd.p_dot[i];
  }
  if (!(std::abs(total - 1.0) <= 1e-10)) throw std::invalid_argument("spectrum does not sum to one");
  if (!(std::abs(total_dot) <= 1e-9)) throw std::invalid_argument("spectrum derivative does not sum to zero");
}

/// sum_i pdot_i^2 / p_i. Throws if some p_i = 0 carries a nonzero derivative.
inline double qfi_diagonal_spectrum(std::span<const double> p, std::span<const double> p_dot) {
  if (p.size() != p_dot.size()) throw std::invalid_argument("spectrum/derivative length mismatch");
  double out = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) {
      if (p_dot[i] != 0.0) throw std::domain_error("zero population with nonzero derivative");
      continue;
    }
    out += p_dot[i] * p_dot[i] / p[i];
  }
  return out;
}

/// QFI of a pure state sum_i sqrt(p_i)|e_i>|i> whose only T-dependence is in
/// p_i; equals sum_i pdot_i^2 / p_i over entries with p_i > 1e-12.
inline double qfi_pure_state(const SpectrumDerivative& sd) {
  validate(sd);
  double out = 0.0;
  for (std::size_t i = 0; i < sd.p.size(); ++i)
    if (sd.p[i] > 1e-12) out += sd.p_dot[i] * sd.p_dot[i] / sd.p[i];
  return out;
}

/// {1 - r, r} and {-r', r'} for the sigma_z qubit.
inline SpectrumDerivative thermal_spectrum_derivative(double temperature) {
  const double r = r_coefficient(temperature);
  const double d = dr_dT(temperature);
  return {{1.0 - r, r}, {-d, d}};
}

/// F_Q of the sigma_z thermal qubit: r'^2 (1/r + 1/(1 - r)).
inline double qfi_thermal_closed_form(double temperature) {
  const double r = r_coefficient(temperature);
  const double excited = 1.0 / (1.0 + std::exp(2.0 / temperature));
  const double d = dr_dT(temperature);
  return d * d * (1.0 / r + 1.0 / excited);
}

/// Variance lower bound 1 / (n F).
inline double cramer_rao_bound(double fisher, long long n = 1) {
  if (!(fisher > 0.0)) throw std::domain_error("Fisher information must be positive");
  if (n < 1) throw std::invalid_argument("number of repetitions must be at least 1");
  return 1.0 / (static_cast<double>(n) * fisher);
}

}  // namespace qthermo
