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
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>

namespace qthermo {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};

/// Dense square complex matrix of compile-time dimension N, row-major.
///
/// The library only ever needs N = 2 (probe) and N = 4 (probe + environment),
/// so storage is inline and every operation is allocation-free.
template <std::size_t N>
class Matrix {
  static_assert(N > 0, "matrix dimension must be positive");

 public:
  using value_type = Complex;
  static constexpr std::size_t dim = N;

  constexpr Matrix() = default;

  /// Row-major entries; throws if the count is not N*N.
  Matrix(std::initializer_list<Complex> entries) {
    if (entries.size() != N * N) {
      throw std::invalid_argument("Matrix<" + std::to_string(N) + ">: expected " +
                                  std::to_string(N * N) + " entries, got " +
                                  std::to_string(entries.size()));
    }
    std::copy(entries.begin(), entries.end(), data_.begin());
  }

  static Matrix from_span(std::span<const Complex> entries) {
    if (entries.size() != N * N) {
      throw std::invalid_argument("Matrix<" + std::to_string(N) + ">: expected " +
                                  std::to_string(N * N) + " entries, got " +
                                  std::to_string(entries.size()));
    }
    Matrix m;
    std::copy(entries.begin(), entries.end(), m.data_.begin());
    return m;
  }

  static constexpr Matrix identity() {
    Matrix m;
    for (std::size_t i = 0; i < N; ++i) m.data_[i * N + i] = 1.0;
    return m;
  }

  static constexpr Matrix diagonal(const std::array<Complex, N>& d) {
    Matrix m;
    for (std::size_t i = 0; i < N; ++i) m.data_[i * N + i] = d[i];
    return m;
  }

  constexpr Complex& operator()(std::size_t row, std::size_t col) { return data_[row * N + col]; }
  constexpr const Complex& operator()(std::size_t row, std::size_t col) const {
    return data_[row * N + col];
  }

  std::span<const Complex, N * N> entries() const { return data_; }

  Matrix& operator+=(const Matrix& o) {
    for (std::size_t k = 0; k < N * N; ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    for (std::size_t k = 0; k < N * N; ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(Complex s) {
    for (auto& x : data_) x *= s;
    return *this;
  }
  Matrix& operator*=(double s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator-(Matrix a) { return a *= -1.0; }
  friend Matrix operator*(Matrix a, Complex s) { return a *= s; }
  friend Matrix operator*(Complex s, Matrix a) { return a *= s; }
  friend Matrix operator*(Matrix a, double s) { return a *= s; }
  friend Matrix operator*(double s, Matrix a) { return a *= s; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    Matrix out;
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t k = 0; k < N; ++k) {
        const Complex aik = a.data_[i * N + k];
        if (aik == Complex{}) continue;
        for (std::size_t j = 0; j < N; ++j) out.data_[i * N + j] += aik * b.data_[k * N + j];
      }
    }
    return out;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::array<Complex, N * N> data_{};
};

using Matrix2 = Matrix<2>;
using Matrix4 = Matrix<4>;

namespace pauli {
inline const Matrix2 kI2 = Matrix2::identity();
inline const Matrix2 kX{0.0, 1.0, 1.0, 0.0};
inline const Matrix2 kY{0.0, -kI, kI, 0.0};
inline const Matrix2 kZ{1.0, 0.0, 0.0, -1.0};
inline const std::array<Matrix2, 3> kXYZ{kX, kY, kZ};
}  // namespace pauli

template <std::size_t N>
Matrix<N> adjoint(const Matrix<N>& m) {
  Matrix<N> out;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) out(i, j) = std::conj(m(j, i));
  return out;
}

template <std::size_t N>
Complex trace(const Matrix<N>& m) {
  Complex t{};
  for (std::size_t i = 0; i < N; ++i) t += m(i, i);
  return t;
}

/// Largest entry modulus.
template <std::size_t N>
double max_norm(const Matrix<N>& m) {
  double out = 0.0;
  for (const auto& x : m.entries()) out = std::max(out, std::abs(x));
  return out;
}

template <std::size_t N>
Matrix<N> commutator(const Matrix<N>& a, const Matrix<N>& b) {
  return a * b - b * a;
}

/// max |m - m^dagger|
template <std::size_t N>
double hermiticity_deviation(const Matrix<N>& m) {
  double out = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i; j < N; ++j) out = std::max(out, std::abs(m(i, j) - std::conj(m(j, i))));
  return out;
}

/// max |u u^dagger - 1|
template <std::size_t N>
double unitarity_deviation(const Matrix<N>& u) {
  return max_norm(u * adjoint(u) - Matrix<N>::identity());
}

/// Kronecker product a (x) b.
template <std::size_t A, std::size_t B>
Matrix<A * B> tensor(const Matrix<A>& a, const Matrix<B>& b) {
  Matrix<A * B> out;
  for (std::size_t i = 0; i < A; ++i)
    for (std::size_t j = 0; j < A; ++j) {
      const Complex aij = a(i, j);
      for (std::size_t k = 0; k < B; ++k)
        for (std::size_t l = 0; l < B; ++l) out(i * B + k, j * B + l) = aij * b(k, l);
    }
  return out;
}

/// Trace over the second (environment) factor of a (dim_s * dim_e) operator.
template <std::size_t S, std::size_t E>
Matrix<S> partial_trace_second(const Matrix<S * E>& m) {
  Matrix<S> out;
  for (std::size_t i = 0; i < S; ++i)
    for (std::size_t j = 0; j < S; ++j) {
      Complex acc{};
      for (std::size_t k = 0; k < E; ++k) acc += m(i * E + k, j * E + k);
      out(i, j) = acc;
    }
  return out;
}

/// Trace over the first (probe) factor.
template <std::size_t S, std::size_t E>
Matrix<E> partial_trace_first(const Matrix<S * E>& m) {
  Matrix<E> out;
  for (std::size_t i = 0; i < E; ++i)
    for (std::size_t j = 0; j < E; ++j) {
      Complex acc{};
      for (std::size_t k = 0; k < S; ++k) acc += m(k * E + i, k * E + j);
      out(i, j) = acc;
    }
  return out;
}

/// Tr_E for the qubit (x) qubit layout used throughout.
inline Matrix2 partial_trace_env(const Matrix4& m) { return partial_trace_second<2, 2>(m); }

/// Tr_S for the qubit (x) qubit layout.
inline Matrix2 partial_trace_probe(const Matrix4& m) { return partial_trace_first<2, 2>(m); }

class NotHermitianError : public std::invalid_argument {
 public:
  explicit NotHermitianError(double deviation)
      : std::invalid_argument("matrix is not Hermitian (max |m - m^H| = " +
                              std::to_string(deviation) + ")"),
        deviation_(deviation) {}
  double deviation() const noexcept { return deviation_; }

 private:
  double deviation_;
};

inline constexpr double kHermitianTolerance = 1e-10;

template <std::size_t N>
struct EigenDecomposition {
  std::array<double, N> eigenvalues{};  // ascending
  Matrix<N> eigenvectors;               // columns
};

namespace detail {

// One cyclic Jacobi sweep over all (p, q) pairs; a and v updated in place.
template <std::size_t N>
void jacobi_sweep(Matrix<N>& a, Matrix<N>& v) {
  for (std::size_t p = 0; p + 1 < N; ++p) {
    for (std::size_t q = p + 1; q < N; ++q) {
      const Complex apq = a(p, q);
      const double mag = std::abs(apq);
      if (mag == 0.0) continue;
      const Complex phase = apq / mag;
      const double app = a(p, p).real();
      const double aqq = a(q, q).real();
      const double theta = (aqq - app) / (2.0 * mag);
      const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
      const double c = 1.0 / std::sqrt(t * t + 1.0);
      const double s = t * c;
      // J = 1 except J_pp = J_qq = c, J_pq = s e^{i phi}, J_qp = -s e^{-i phi}; a <- J^H a J.
      const Complex jpq = s * phase;
      const Complex jqp = -s * std::conj(phase);
      for (std::size_t k = 0; k < N; ++k) {
        const Complex akp = a(k, p);
        const Complex akq = a(k, q);
        a(k, p) = akp * c + akq * jqp;
        a(k, q) = akp * jpq + akq * c;
      }
      for (std::size_t k = 0; k < N; ++k) {
        const Complex apk = a(p, k);
        const Complex aqk = a(q, k);
        a(p, k) = c * apk + std::conj(jqp) * aqk;
        a(q, k) = std::conj(jpq) * apk + c * aqk;
      }
      a(p, q) = 0.0;
      a(q, p) = 0.0;
      a(p, p) = a(p, p).real();
      a(q, q) = a(q, q).real();
      for (std::size_t k = 0; k < N; ++k) {
        const Complex vkp = v(k, p);
        const Complex vkq = v(k, q);
        v(k, p) = vkp * c + vkq * jqp;
        v(k, q) = vkp * jpq + vkq * c;
      }
    }
  }
}

template <std::size_t N>
double off_diagonal_max(const Matrix<N>& a) {
  double out = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      if (i != j) out = std::max(out, std::abs(a(i, j)));
  return out;
}

}  // namespace detail

inline constexpr double kJacobiTolerance = 1e-13;
inline constexpr int kJacobiMaxSweeps = 100;

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Inputs within 1e-10 of Hermitian are symmetrized first; anything further
/// off throws NotHermitianError. Eigenvalues come back ascending with the
/// matching eigenvectors as columns.
template <std::size_t N>
EigenDecomposition<N> eig_hermitian(const Matrix<N>& m) {
  const double dev = hermiticity_deviation(m);
  if (!(dev <= kHermitianTolerance)) throw NotHermitianError(dev);

  Matrix<N> a = 0.5 * (m + adjoint(m));
  Matrix<N> v = Matrix<N>::identity();
  const double threshold = kJacobiTolerance * std::max(1.0, max_norm(a));
  for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
    if (detail::off_diagonal_max(a) < threshold) break;
    detail::jacobi_sweep(a, v);
  }

  std::array<std::size_t, N> order;
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });

  EigenDecomposition<N> out;
  for (std::size_t k = 0; k < N; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < N; ++i) out.eigenvectors(i, k) = v(i, order[k]);
  }
  return out;
}

/// V diag(f(lambda)) V^H for a real function f of the spectrum.
template <std::size_t N, class Fn>
Matrix<N> apply_spectral(const EigenDecomposition<N>& ed, Fn&& f) {
  Matrix<N> out;
  for (std::size_t k = 0; k < N; ++k) {
    const Complex fk = f(ed.eigenvalues[k]);
    for (std::size_t i = 0; i < N; ++i) {
      const Complex vik = ed.eigenvectors(i, k) * fk;
      for (std::size_t j = 0; j < N; ++j) out(i, j) += vik * std::conj(ed.eigenvectors(j, k));
    }
  }
  return out;
}

/// exp(-i h) for Hermitian h.
template <std::size_t N>
Matrix<N> exp_minus_i_hermitian(const Matrix<N>& h) {
  return apply_spectral(eig_hermitian(h), [](double lambda) { return std::exp(-kI * lambda); });
}

/// Smallest eigenvalue of a Hermitian matrix.
template <std::size_t N>
double min_eigenvalue(const Matrix<N>& m) {
  return eig_hermitian(m).eigenvalues[0];
}

}  // namespace qthermo
