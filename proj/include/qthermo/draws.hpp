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

#include <cstddef>

#include "qthermo/linalg.hpp"
#include "qthermo/random.hpp"
#include "qthermo/states.hpp"
#include "qthermo/unitaries.hpp"

// Random parameter draws, uniform over each builder's parameter box.
namespace qthermo::draw {

inline Su2Params su2_params(Rng& rng) {
  return {rng.uniform(0.0, kPi), rng.uniform(0.0, kTwoPi), rng.uniform(0.0, 2.0 * kTwoPi)};
}

inline KrausCiracParams kraus_cirac_params(Rng& rng) {
  KrausCiracParams p;
  for (auto& w : p.w) w = su2_params(rng);
  p.alpha_x = rng.uniform(0.0, 0.5 * kPi);
  p.alpha_y = rng.uniform(0.0, 0.5 * kPi);
  p.alpha_z = rng.uniform(0.0, 0.5 * kPi);
  return p;
}

inline Matrix4 general_unitary(Rng& rng) { return kraus_cirac(kraus_cirac_params(rng)); }

inline EnergyConservingParams energy_conserving_params(Rng& rng) {
  EnergyConservingParams p;
  for (double& l : p.lambda) l = rng.uniform(0.0, kTwoPi);
  return p;
}

inline LocalU1Params u1_params(Rng& rng) {
  return {rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi)};
}

/// Uniform in the closed unit ball.
inline BlochVector bloch(Rng& rng) {
  for (;;) {
    BlochVector v{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    if (v.norm() <= 1.0) return v;
  }
}

/// Entries with real and imaginary parts uniform in [-scale, scale].
template <std::size_t N>
Matrix<N> hermitian(Rng& rng, double scale = 1.0) {
  Matrix<N> m;
  for (std::size_t i = 0; i < N; ++i) {
    m(i, i) = rng.uniform(-scale, scale);
    for (std::size_t j = i + 1; j < N; ++j) {
      m(i, j) = Complex(rng.uniform(-scale, scale), rng.uniform(-scale, scale));
      m(j, i) = std::conj(m(i, j));
    }
  }
  return m;
}

/// A A^H / tr(A A^H) for a random complex A; full rank with probability one.
template <std::size_t N>
Matrix<N> density(Rng& rng) {
  Matrix<N> a;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) a(i, j) = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
  Matrix<N> m = a * adjoint(a);
  return m * (1.0 / trace(m).real());
}

}  // namespace qthermo::draw
