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

#include <cmath>
#include <limits>

#include "qthermo/draws.hpp"
#include "qthermo/fisher.hpp"
#include "qthermo/states.hpp"
#include "test_util.hpp"

namespace qthermo {
namespace {

using testing::MatrixNear;

// Frozen reference values (tests/oracle/oracle_values.py, 50-digit mpmath).
constexpr double kR1 = 0.88079707797788243;
constexpr double kDr1 = -0.20998717080701304;
constexpr double kR2 = 0.7310585786300049;
constexpr double kDr2 = -0.098305966620740926;

TEST(Thermal, CoefficientAndDerivativeMatchOracle) {
  EXPECT_NEAR(r_coefficient(1.0), kR1, 1e-15);
  EXPECT_NEAR(dr_dT(1.0), kDr1, 1e-15);
  EXPECT_NEAR(r_coefficient(2.0), kR2, 1e-15);
  EXPECT_NEAR(dr_dT(2.0), kDr2, 1e-15);
}

TEST(Thermal, StateAtUnitTemperature) {
  const Matrix2 tau = thermal_state(ThermalSpec<2>{1.0}).matrix();
  EXPECT_NEAR(tau(0, 0).real(), 1.0 - kR1, 1e-14);
  EXPECT_NEAR(tau(1, 1).real(), kR1, 1e-14);
  EXPECT_TRUE(MatrixNear(tau, qubit_thermal_matrix(1.0), 1e-14));
}

TEST(Thermal, HighTemperatureIsMaximallyMixed) {
  const Matrix2 tau = thermal_state(ThermalSpec<2>{1e9}).matrix();
  EXPECT_TRUE(MatrixNear(tau, 0.5 * pauli::kI2, 1e-8));
}

TEST(Thermal, LowTemperatureIsGround) {
  const Matrix2 tau = thermal_state(ThermalSpec<2>{0.01}).matrix();
  EXPECT_NEAR(tau(1, 1).real(), 1.0, 1e-15);
}

TEST(Thermal, TwoQubitGibbsIsProduct) {
  const Matrix4 joint = thermal_state(ThermalSpec<4>{1.3}).matrix();
  const Matrix2 tau = qubit_thermal_matrix(1.3);
  EXPECT_TRUE(MatrixNear(joint, tensor(tau, tau), 1e-14));
}

TEST(Thermal, RejectsNonPositiveTemperature) {
  EXPECT_THROW(thermal_state(ThermalSpec<2>{0.0}), std::domain_error);
  EXPECT_THROW(thermal_state(ThermalSpec<2>{-1.0}), std::domain_error);
  EXPECT_THROW(r_coefficient(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
}

TEST(Thermal, GroundPopulationDominates) {
  for (double t = 0.1; t < 50.0; t *= 1.3) {
    const Matrix2 tau = qubit_thermal_matrix(t);
    EXPECT_GT(tau(1, 1).real(), tau(0, 0).real()) << "T = " << t;
  }
}

TEST(Thermal, StencilDerivativeMatchesAnalytic) {
  for (int i = 0; i <= 100; ++i) {
    const double t = 1.0 + 0.01 * i;
    const Matrix2 d = state_derivative_stencil([](double s) { return qubit_thermal_matrix(s); }, t);
    EXPECT_TRUE(MatrixNear(d, qubit_thermal_derivative(t), 1e-9)) << "T = " << t;
  }
}

TEST(DensityMatrix, ValidatesInvariants) {
  EXPECT_NO_THROW(DensityMatrix<2>(0.5 * pauli::kI2));
  EXPECT_THROW(DensityMatrix<2>(pauli::kI2), InvalidStateError);
  EXPECT_THROW(DensityMatrix<2>(Matrix2{0.5, 1.0, 0.0, 0.5}), InvalidStateError);
  try {
    DensityMatrix<2>(Matrix2::diagonal({1.2, -0.2}));
    FAIL() << "expected PositivityError";
  } catch (const PositivityError& e) {
    EXPECT_NEAR(e.min_eigenvalue(), -0.2, 1e-15);
  }
}

TEST(DensityMatrix, ToleratesTinyNegativeEigenvaluesWithoutRewriting) {
  const Matrix2 m = Matrix2::diagonal({1.0 + 5e-11, -5e-11});
  const DensityMatrix<2> rho(m);
  EXPECT_EQ(rho.matrix(), m);
}

TEST(Bloch, StateAndValidation) {
  const DensityMatrix<2> rho = bloch_state({0.0, 0.0, 1.0});
  EXPECT_TRUE(MatrixNear(rho.matrix(), Matrix2::diagonal({1.0, 0.0}), 0.0));
  EXPECT_TRUE(MatrixNear(bloch_state({}).matrix(), 0.5 * pauli::kI2, 0.0));
  EXPECT_THROW(bloch_state({1.0, 1.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(bloch_state({std::nan(""), 0.0, 0.0}), std::invalid_argument);
}

TEST(Bloch, ProjectionRescalesOnlyOutsideBall) {
  const BlochVector in = project_to_ball({0.1, 0.2, 0.3});
  EXPECT_EQ(in.x, 0.1);
  const BlochVector out = project_to_ball({3.0, 0.0, 4.0});
  EXPECT_NEAR(out.x, 0.6, 1e-15);
  EXPECT_NEAR(out.z, 0.8, 1e-15);
}

TEST(Purification, MarginalsAreThermal) {
  for (double t : {0.5, 1.0, 1.5, 2.0, 7.0}) {
    const Matrix4 psi = purification(t).matrix();
    EXPECT_TRUE(MatrixNear(partial_trace_probe(psi), qubit_thermal_matrix(t), 1e-12));
    EXPECT_TRUE(MatrixNear(partial_trace_env(psi), qubit_thermal_matrix(t), 1e-12));
    EXPECT_NEAR(std::abs(trace(psi * psi)), 1.0, 1e-14);
  }
  EXPECT_THROW(purification(0.0), std::domain_error);
}

TwoQubitStateParams oracle_state() {
  TwoQubitStateParams p;
  p.a = {0.05, -0.04, -0.1};
  p.c = {{{0.1, 0.02, 0.0}, {-0.03, 0.08, 0.01}, {0.0, 0.04, 0.15}}};
  return p;
}

TEST(TwoQubit, ConstrainedMatrixMatchesOracle) {
  const Matrix4 m = constrained_joint_matrix(oracle_state(), 1.0);
  EXPECT_NEAR(m(0, 0).real(), 0.072101461011058798, 1e-15);
  EXPECT_NEAR(m(1, 1).real(), 0.37789853898894121, 1e-15);
  EXPECT_NEAR(m(2, 2).real(), 0.047101461011058804, 1e-15);
  EXPECT_NEAR(m(3, 3).real(), 0.50289853898894121, 1e-15);
  EXPECT_NEAR(std::abs(m(0, 2) - Complex(0.0125, 0.0075)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(m(1, 3) - Complex(0.0125, 0.0125)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(m(0, 1) - Complex(0.0, -0.01)), 0.0, 1e-15);
  EXPECT_NEAR(constrained_two_qubit_state(oracle_state(), 1.0).min_eigenvalue(), 0.034508046865062772, 1e-12);
}

TEST(TwoQubit, FastAssemblyAgreesWithPauliExpansion) {
  Rng rng(3);
  for (int k = 0; k < 500; ++k) {
    TwoQubitStateParams p;
    for (double& v : p.a) v = rng.uniform(-1, 1);
    for (auto& row : p.c)
      for (double& v : row) v = rng.uniform(-1, 1);
    const double bz = rng.uniform(-1, 1);
    TwoQubitStateParams q = p;
    q.b = {0.0, 0.0, bz};
    EXPECT_TRUE(MatrixNear(detail::joint_matrix_fast(p, bz), assemble_two_qubit_matrix(q), 1e-15));
  }
}

TEST(TwoQubit, PauliCoefficientsInvertAssembly) {
  Rng rng(5);
  for (int k = 0; k < 100; ++k) {
    TwoQubitStateParams p;
    for (double& v : p.a) v = rng.uniform(-1, 1);
    for (double& v : p.b) v = rng.uniform(-1, 1);
    for (auto& row : p.c)
      for (double& v : row) v = rng.uniform(-1, 1);
    const TwoQubitStateParams q = pauli_coefficients(assemble_two_qubit_matrix(p));
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_NEAR(q.a[i], p.a[i], 1e-14);
      EXPECT_NEAR(q.b[i], p.b[i], 1e-14);
      for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(q.c[i][j], p.c[i][j], 1e-14);
    }
  }
}

TEST(TwoQubit, RejectsOutOfRangeAndNonPositive) {
  TwoQubitStateParams p;
  p.a[0] = 1.5;
  EXPECT_THROW(constrained_two_qubit_state(p, 1.0), std::invalid_argument);
  TwoQubitStateParams q;
  q.c[0][0] = q.c[1][1] = q.c[2][2] = 1.0;  // 1 + XX + YY + ZZ has eigenvalue -2
  EXPECT_THROW(constrained_two_qubit_state(q, 1.0), PositivityError);
}

TEST(TwoQubit, ProductOfMixedAndThermalIsValid) {
  const DensityMatrix<4> rho = constrained_two_qubit_state(TwoQubitStateParams{}, 1.2);
  EXPECT_TRUE(MatrixNear(rho.matrix(), tensor(0.5 * pauli::kI2, qubit_thermal_matrix(1.2)), 1e-15));
}

TEST(Sampler, AcceptedStatesAreValidWithThermalMarginal) {
  std::uint64_t total = 0;
  for (std::uint64_t k = 0; k < 3; ++k) {
    const SampledState s = sample_constrained_state(derive_seed(99, {k}), 1.0);
    total += s.draws;
    EXPECT_GE(s.draws, 1u);
    for (double t : {0.998, 0.999, 1.0, 1.001, 1.002}) {
      const DensityMatrix<4> rho = constrained_two_qubit_state(s.params, t);
      EXPECT_TRUE(MatrixNear(partial_trace_probe(rho.matrix()), qubit_thermal_matrix(t), 1e-12));
    }
  }
  const double acceptance = 3.0 / static_cast<double>(total);
  EXPECT_GT(acceptance, 0.0);
  RecordProperty("acceptance_rate_T1", std::to_string(acceptance));
}

TEST(Sampler, DeterministicInSeed) {
  const auto a = sample_constrained_state(5, 1.5);
  const auto b = sample_constrained_state(5, 1.5);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.draws, b.draws);
}

TEST(Sampler, WindowStateIsValidAcrossTheWindow) {
  const auto s = sample_constrained_state(21, SamplingWindow{1.0, 2.0, 0.001});
  for (double t = 0.998; t <= 2.0021; t += 0.0125) EXPECT_NO_THROW(constrained_two_qubit_state(s.params, t));
}

TEST(Sampler, ExhaustionAndBadWindow) {
  EXPECT_THROW(sample_constrained_state(1, 1.0, 0.001, 10), SamplerExhaustedError);
  EXPECT_THROW(sample_constrained_state(1, SamplingWindow{2.0, 1.0, 0.001}), std::invalid_argument);
  EXPECT_THROW(sample_constrained_state(1, 0.001, 0.001), std::domain_error);
}

}  // namespace
}  // namespace qthermo
