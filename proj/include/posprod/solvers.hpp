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

#include <string>

#include "posprod/opcore.hpp"

namespace posprod {

/// Tolerances and spectral-gap margins shared by the solvers.
struct SolverConfig {
  /// Largest condition number accepted for a block that must be inverted.
  double conditionCap = 1e12;
  /// Minimum |alpha - beta| over alpha in sigma(A), beta in sigma(B) for
  /// Sylvester solvability, relative to max(1, ||A||, ||B||).
  double sylvesterMargin = 1e-6;
  /// |trace| <= traceTol * max(1, ||T||_F) counts as trace zero.
  double traceTol = 1e-10;
};

/// [[u, x], [y, z]] with u k-by-k and z m-by-m.
struct BlockMatrix2x2 {
  Matrix u, x, y, z;

  static BlockMatrix2x2 split(const Matrix& m, Eigen::Index leading);
  Matrix assemble() const;
  /// Throws ShapeError unless the blocks are conformable.
  void validate() const;
};

class SingularBlockError : public NumericError {
 public:
  SingularBlockError(std::string block, double condition);
  const std::string& block() const { return block_; }
  double condition() const { return condition_; }

 private:
  std::string block_;
  double condition_;
};

class SpectralOverlapError : public NumericError {
 public:
  SpectralOverlapError(Complex fromA, Complex fromB, double margin);
  Complex fromA() const { return fromA_; }
  Complex fromB() const { return fromB_; }

 private:
  Complex fromA_, fromB_;
};

class TraceError : public NumericError {
 public:
  TraceError(const std::string& what, Complex trace);
  Complex trace() const { return trace_; }

 private:
  Complex trace_;
};

/// Inverse through the Schur complement d = (z - y u^{-1} x)^{-1}.
BlockMatrix2x2 blockInverse(const BlockMatrix2x2& s, const SolverConfig& config = {});

/// Solves A X - X B = C by reducing both coefficients to upper triangular
/// Schur form and back-substituting column by column.
Matrix sylvesterSolve(const Matrix& a, const Matrix& b, const Matrix& c,
                      const SolverConfig& config = {});

struct ZeroDiagonalization {
  /// Unitary R with zeroDiagonal = R T R^{-1}.
  Matrix similarity;
  Matrix zeroDiagonal;
};

ZeroDiagonalization zeroDiagonalize(const Matrix& t0, const SolverConfig& config = {});

struct CommutatorSolution {
  Matrix x, y;
  /// ||XY - YX - T0||_F
  double residual = 0.0;
  Matrix similarityUsed;
};

/// X, Y with XY - YX = T0 for a trace-zero T0.
CommutatorSolution commutatorSolve(const Matrix& t0, const SolverConfig& config = {});

}  // namespace posprod
