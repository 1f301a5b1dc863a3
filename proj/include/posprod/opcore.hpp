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

#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace posprod {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Raised on non-conformable, non-square, empty or non-finite operands.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical precondition (invertibility, spectral
/// separation, trace condition) does not hold for the given input.
class NumericError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr double kDefaultTol = 1e-9;
inline constexpr double kDefaultConditionCap = 1e8;

void requireSquare(const Matrix& m, std::string_view what);
void requireFinite(const Matrix& m, std::string_view what);
void requireSameShape(const Matrix& a, const Matrix& b, std::string_view what);

/// Spectral norm (largest singular value).
double opNorm(const Matrix& m);
/// 2-norm condition number; +inf for a numerically singular matrix.
double conditionNumber(const Matrix& m);
Matrix hermitianPart(const Matrix& m);

/// Distance from a complex number to the half line [0, inf).
double distToRPlus(Complex lambda);

/// Hilbert-Schmidt inner product trace(Y^* X).
Complex hsInner(const Matrix& x, const Matrix& y);

struct SpectrumReport {
  std::vector<Complex> eigenvalues;
  double maxDistToRPlus = 0.0;
  bool isRealNonnegative = true;
  /// Absolute threshold that decided isRealNonnegative.
  double tolerance = 0.0;
};

/// All eigenvalues with multiplicity. The containment verdict uses
/// tol * ||m||.
SpectrumReport eig(const Matrix& m, double tol = kDefaultTol);

/// Hermitian within tol*||m|| and min eigenvalue of the Hermitian part
/// >= -tol*||m||.
bool isPsd(const Matrix& m, double tol = kDefaultTol);

enum class PsdKind { PositiveSemidefinite, SimilarToPositive, Neither };

std::string_view toString(PsdKind kind);

struct SpectralConfig {
  double tol = kDefaultTol;
  /// Eigenvector-basis condition number above which a matrix is not
  /// treated as diagonalizable.
  double conditionCap = kDefaultConditionCap;
  /// Eigenvalues closer than clusterTol*||m|| are one eigenvalue.
  double clusterTol = 1e-8;
  /// Singular values of (m - lambda) below nullTol*||m|| span the eigenspace.
  double nullTol = 1e-7;
};

struct PsdCertificate {
  Matrix subject;
  PsdKind kind = PsdKind::Neither;
  /// V with V^{-1} subject V = diag(spectrum) when similar to positive.
  std::optional<Matrix> witness;
  /// Real diagonal paired with the witness.
  std::vector<double> spectrum;
  double minEigenvalue = 0.0;
  /// Smallest distance between distinct eigenvalue clusters (inf if fewer
  /// than two clusters).
  double diagonalizabilityGap = 0.0;
  double witnessCondition = 0.0;
  double tolerance = kDefaultTol;
  std::string diagnostic;

  bool certified() const { return kind != PsdKind::Neither; }
};

PsdCertificate similarToPositiveCheck(const Matrix& m, double tol = kDefaultTol);
PsdCertificate similarToPositiveCheck(const Matrix& m, const SpectralConfig& config);

/// Groups eigenvalues into clusters; returns the cluster centres with
/// their multiplicities.
struct EigenCluster {
  Complex center;
  std::size_t multiplicity = 0;
};
std::vector<EigenCluster> clusterEigenvalues(const std::vector<Complex>& values,
                                             double radius);

/// Bottleneck distance between two equal-size multisets of complex numbers
/// (optimal matching minimizing the largest paired distance).
double multisetDistance(const std::vector<Complex>& a, const std::vector<Complex>& b);

}  // namespace posprod
