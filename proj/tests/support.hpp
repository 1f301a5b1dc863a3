// Copyright 2026 The posprod Authors
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

// Independent reference computations for the tests. None of these reuse the
// library code path they check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "posprod/luders.hpp"
#include "posprod/opcore.hpp"
#include "posprod/random.hpp"

namespace posprod::testing {

/// Characteristic polynomial coefficients c_0..c_n (monic, c_n = 1) by
/// Faddeev-LeVerrier. Fine for the small n used in tests.
inline std::vector<Complex> charPoly(const Matrix& m) {
  const Eigen::Index n = m.rows();
  std::vector<Complex> c(static_cast<std::size_t>(n + 1));
  c[static_cast<std::size_t>(n)] = 1.0;
  Matrix mk = Matrix::Zero(n, n);
  const Matrix id = Matrix::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    mk = m * mk + c[static_cast<std::size_t>(n - k + 1)] * id;
    c[static_cast<std::size_t>(n - k)] = -(m * mk).trace() / static_cast<double>(k);
  }
  return c;
}

inline Complex hornerValue(const std::vector<Complex>& c, Complex z, Complex* derivative) {
  Complex p = 0.0, dp = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) {
    dp = dp * z + p;
    p = p * z + c[k];
  }
  if (derivative) *derivative = dp;
  return p;
}

/// Roots of a monic polynomial by Durand-Kerner iteration, polished with Newton.
inline std::vector<Complex> polyRoots(const std::vector<Complex>& c) {
  const std::size_t n = c.size() - 1;
  double radius = 0.0;
  for (std::size_t k = 0; k < n; ++k) radius = std::max(radius, std::abs(c[k]));
  radius += 1.0;
  std::vector<Complex> z(n);
  for (std::size_t k = 0; k < n; ++k) z[k] = radius * std::polar(1.0, 0.4 + 2.0 * M_PI * k / n);
  for (int it = 0; it < 5000; ++it) {
    double move = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Complex denom = 1.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) denom *= z[i] - z[j];
      }
      const Complex step = hornerValue(c, z[i], nullptr) / denom;
      z[i] -= step;
      move = std::max(move, std::abs(step));
    }
    if (move < 1e-15 * radius) break;
  }
  for (auto& root : z) {
    for (int it = 0; it < 3; ++it) {
      Complex d;
      const Complex p = hornerValue(c, root, &d);
      if (std::abs(d) > 0.0) root -= p / d;
    }
  }
  return z;
}

/// Eigenvalues as roots of the characteristic polynomial.
inline std::vector<Complex> charPolyEigenvalues(const Matrix& m) { return polyRoots(charPoly(m)); }

/// Solves A X - X B = C through the n*m linear system (I (x) A - B^T (x) I).
inline Matrix sylvesterByKronecker(const Matrix& a, const Matrix& b, const Matrix& c) {
  const Eigen::Index n = a.rows(), m = b.rows();
  Matrix big = Matrix::Zero(n * m, n * m);
  for (Eigen::Index j = 0; j < m; ++j) {
    big.block(j * n, j * n, n, n) += a;
    for (Eigen::Index l = 0; l < m; ++l) {
      big.block(l * n, j * n, n, n).diagonal().array() -= b(j, l);
    }
  }
  const Vector rhs = Eigen::Map<const Vector>(c.data(), c.size());
  const Vector x = Eigen::FullPivLU<Matrix>(big).solve(rhs);
  return Eigen::Map<const Matrix>(x.data(), n, m);
}

inline Matrix denseInverse(const Matrix& m) { return Eigen::FullPivLU<Matrix>(m).inverse(); }

/// Column i + n*j is vec(op(E_ij)).
inline Matrix matrixUnitAssembly(const ElementaryOperator& op) {
  const Eigen::Index n = op.dimension();
  Matrix out(n * n, n * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      Matrix e = Matrix::Zero(n, n);
      e(i, j) = 1.0;
      const Matrix image = posprod::apply(op, e);
      out.col(i + n * j) = Eigen::Map<const Vector>(image.data(), n * n);
    }
  }
  return out;
}

/// Smallest singular value through a full two-sided Jacobi SVD.
inline double sigmaMinJacobi(const Matrix& m, Complex lambda) {
  Matrix shifted = m - lambda * Matrix::Identity(m.rows(), m.cols());
  Eigen::JacobiSVD<Matrix> svd(shifted);
  return svd.singularValues().minCoeff();
}

/// Random square matrix with trace exactly `trace` (up to rounding).
inline Matrix randomWithTrace(Rng& rng, Eigen::Index n, Complex trace) {
  Matrix t = randomGaussian(rng, n, n);
  t.diagonal().array() += (trace - t.trace()) / static_cast<double>(n);
  return t;
}

/// Diagonalizable matrix with the given eigenvalues and cond(V) <= maxCond.
inline Matrix withEigenvalues(Rng& rng, const std::vector<Complex>& values, double maxCond) {
  const auto n = static_cast<Eigen::Index>(values.size());
  const Matrix v = randomWellConditioned(rng, n, maxCond);
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) d(k, k) = values[static_cast<std::size_t>(k)];
  return v * d * denseInverse(v);
}

/// PSD matrix of random rank (including rank-deficient cases).
inline Matrix randomPsdAnyRank(Rng& rng, Eigen::Index n) {
  std::uniform_int_distribution<Eigen::Index> rankDist(1, n);
  const Matrix q = randomGaussian(rng, rankDist(rng), n);
  return q.adjoint() * q;
}

inline int uniformInt(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double uniformReal(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline bool bitEqual(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const double pa[2] = {a.data()[k].real(), a.data()[k].imag()};
    const double pb[2] = {b.data()[k].real(), b.data()[k].imag()};
    if (std::memcmp(pa, pb, sizeof pa) != 0) return false;
  }
  return true;
}

}  // namespace posprod::testing
