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

#include <optional>
#include <string>
#include <vector>

#include "posprod/kernels.hpp"
#include "posprod/lab.hpp"
#include "posprod/opcore.hpp"

namespace posprod {

using kernels::CoefficientPair;

/// X -> sum_j A_j X B_j. A Lueders operation has A_j = B_j, all PSD.
struct ElementaryOperator {
  std::vector<CoefficientPair> pairs;
  bool isLuders = false;

  Eigen::Index dimension() const { return pairs.front().first.rows(); }
  int length() const { return static_cast<int>(pairs.size()); }
};

ElementaryOperator buildElementary(std::vector<CoefficientPair> pairs, double tol = kDefaultTol);

/// Lueders operation X -> sum_j A_j X A_j.
ElementaryOperator buildLuders(const std::vector<Matrix>& coefficients, double tol = kDefaultTol);

Matrix apply(const ElementaryOperator& op, const Matrix& x);

/// Column-stacking vec: entry (i, j) goes to i + n*j.
Vector vec(const Matrix& x);
Matrix unvec(const Vector& v, Eigen::Index n);

/// M = sum_j B_j^T (x) A_j, so that vec(op(X)) = M vec(X).
Matrix vectorize(const ElementaryOperator& op, Execution execution = Execution::Parallel);

SpectrumReport spectrum(const ElementaryOperator& op, double tol = kDefaultTol);

/// Positivity of the vectorized operator on (M_n, trace inner product).
struct HsPositivity {
  PsdCertificate certificate;
  /// ||M - M^*|| / max(1, ||M||)
  double hermitianDefect = 0.0;
  /// Smallest eigenvalue of the Hermitian part of M, divided by max(1, ||M||).
  double minEigenvalue = 0.0;
  bool coefficientsPsd = false;
  /// Length two with commuting A_1, A_2 (or B_1, B_2): distance of sigma(op)
  /// to [0, inf).
  std::optional<double> commutingSideDistToRPlus;
};

HsPositivity psdOnHS(const ElementaryOperator& op, double tol = 1e-10);

/// Raised when an eigenvalue outside [0, inf) is requested in finite dimension.
class EigenvalueRejected : public NumericError {
 public:
  EigenvalueRejected(Complex lambda, double bound);
  Complex lambda() const { return lambda_; }
  /// dist(lambda, [0, inf)): no sum of PSD products gets closer to lambda I.
  double bound() const { return bound_; }

 private:
  Complex lambda_;
  double bound_;
};

struct LudersDemo {
  Complex lambda;
  /// T_j = diag(A_j, B_j)
  std::vector<Matrix> blockCoefficients;
  /// X0 = [[0, I], [0, 0]]
  Matrix eigenvector;
  /// ||Phi(X0) - lambda X0||_F
  double eigenResidual = 0.0;
  ElementaryOperator op;
};

/// From PSD pairs with sum_j A_j B_j = lambda I builds the Lueders operation
/// Phi(X) = sum_j T_j X T_j having lambda as an eigenvalue.
LudersDemo eigenvalueDemo(Complex lambda, const std::vector<PositiveProduct>& products);

std::vector<kernels::PseudoPoint> pseudospectrum(const ElementaryOperator& op,
                                                 const kernels::Grid& grid,
                                                 Execution execution = Execution::Parallel);

/// re,im,sigma_min
std::string pseudospectrumCsv(const std::vector<kernels::PseudoPoint>& points);

}  // namespace posprod
