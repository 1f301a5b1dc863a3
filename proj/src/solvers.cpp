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

#include "posprod/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace posprod {

namespace {

std::string describe(Complex z) {
  std::ostringstream out;
  out.precision(6);
  out << '(' << z.real() << ", " << z.imag() << ')';
  return out.str();
}

}  // namespace

SingularBlockError::SingularBlockError(std::string block, double condition)
    : NumericError("block '" + block + "' is numerically singular (condition estimate " +
                   std::to_string(condition) + ")"),
      block_(std::move(block)),
      condition_(condition) {}

SpectralOverlapError::SpectralOverlapError(Complex fromA, Complex fromB, double margin)
    : NumericError("spectra overlap: eigenvalue " + describe(fromA) + " of A and " +
                   describe(fromB) + " of B are closer than " + std::to_string(margin)),
      fromA_(fromA),
      fromB_(fromB) {}

TraceError::TraceError(const std::string& what, Complex trace)
    : NumericError(what + " (trace = " + describe(trace) + ")"), trace_(trace) {}

BlockMatrix2x2 BlockMatrix2x2::split(const Matrix& m, Eigen::Index leading) {
  requireSquare(m, "BlockMatrix2x2::split");
  if (leading <= 0 || leading >= m.rows()) {
    throw ShapeError("BlockMatrix2x2::split: leading block size out of range");
  }
  const Eigen::Index trailing = m.rows() - leading;
  return {m.topLeftCorner(leading, leading), m.topRightCorner(leading, trailing),
          m.bottomLeftCorner(trailing, leading), m.bottomRightCorner(trailing, trailing)};
}

void BlockMatrix2x2::validate() const {
  const Eigen::Index k = u.rows();
  const Eigen::Index m = z.rows();
  const bool ok = k > 0 && m > 0 && u.cols() == k && z.cols() == m && x.rows() == k &&
                  x.cols() == m && y.rows() == m && y.cols() == k;
  if (!ok) throw ShapeError("BlockMatrix2x2: blocks are not conformable");
}

Matrix BlockMatrix2x2::assemble() const {
  validate();
  const Eigen::Index k = u.rows();
  const Eigen::Index m = z.rows();
  Matrix out(k + m, k + m);
  out << u, x, y, z;
  return out;
}

BlockMatrix2x2 blockInverse(const BlockMatrix2x2& s, const SolverConfig& config) {
  s.validate();
  const double condU = conditionNumber(s.u);
  if (!(condU <= config.conditionCap)) throw SingularBlockError("u", condU);
  Eigen::PartialPivLU<Matrix> luU(s.u);
  const Matrix uInv = luU.inverse();

  const Matrix schur = s.z - s.y * uInv * s.x;
  const double condSchur = conditionNumber(schur);
  if (!(condSchur <= config.conditionCap)) throw SingularBlockError("z - y u^-1 x", condSchur);
  const Matrix d = Eigen::PartialPivLU<Matrix>(schur).inverse();

  const Matrix uInvX = uInv * s.x;
  const Matrix yUInv = s.y * uInv;
  const Eigen::Index k = s.u.rows();
  BlockMatrix2x2 inv;
  inv.u = uInv * (Matrix::Identity(k, k) + s.x * d * yUInv);
  inv.x = -uInvX * d;
  inv.y = -d * yUInv;
  inv.z = d;
  return inv;
}

Matrix sylvesterSolve(const Matrix& a, const Matrix& b, const Matrix& c,
                      const SolverConfig& config) {
  requireSquare(a, "sylvesterSolve(A)");
  requireSquare(b, "sylvesterSolve(B)");
  requireFinite(a, "sylvesterSolve(A)");
  requireFinite(b, "sylvesterSolve(B)");
  requireFinite(c, "sylvesterSolve(C)");
  if (c.rows() != a.rows() || c.cols() != b.rows()) {
    throw ShapeError("sylvesterSolve: C must be rows(A) x rows(B)");
  }

  Eigen::ComplexSchur<Matrix> schurA(a);
  Eigen::ComplexSchur<Matrix> schurB(b);
  const Matrix& ta = schurA.matrixT();
  const Matrix& tb = schurB.matrixT();
  const Matrix& ua = schurA.matrixU();
  const Matrix& ub = schurB.matrixU();

  const double scale = std::max({1.0, opNorm(a), opNorm(b)});
  const double margin = config.sylvesterMargin * scale;
  double closest = std::numeric_limits<double>::infinity();
  Complex closestA, closestB;
  for (Eigen::Index i = 0; i < ta.rows(); ++i) {
    for (Eigen::Index j = 0; j < tb.rows(); ++j) {
      const double gap = std::abs(ta(i, i) - tb(j, j));
      if (gap < closest) {
        closest = gap;
        closestA = ta(i, i);
        closestB = tb(j, j);
      }
    }
  }
  if (closest < margin) throw SpectralOverlapError(closestA, closestB, margin);

  // T_A Y - Y T_B = F with Y = U_A^* X U_B, F = U_A^* C U_B.
  const Matrix f = ua.adjoint() * c * ub;
  const Eigen::Index n = ta.rows();
  Matrix y(n, tb.rows());
  for (Eigen::Index j = 0; j < tb.rows(); ++j) {
    Vector rhs = f.col(j);
    for (Eigen::Index i = 0; i < j; ++i) rhs += tb(i, j) * y.col(i);
    Matrix shifted = ta;
    shifted.diagonal().array() -= tb(j, j);
    y.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
  }
  return ua * y * ub.adjoint();
}

CommutatorSolution commutatorSolve(const Matrix& t0, const SolverConfig& config) {
  requireSquare(t0, "commutatorSolve");
  requireFinite(t0, "commutatorSolve");
  const Complex trace = t0.trace();
  if (std::abs(trace) > config.traceTol * std::max(1.0, t0.norm())) {
    throw TraceError(
        "commutatorSolve: every commutator XY - YX of matrices has zero trace, so a matrix "
        "with nonzero trace is not a commutator in finite dimension",
        trace);
  }
  const Eigen::Index n = t0.rows();
  const ZeroDiagonalization prep = zeroDiagonalize(t0, config);
  const Matrix& z = prep.zeroDiagonal;

  // diag(1..n) against an off-diagonal Y: [D, Y]_ij = (i - j) y_ij.
  Matrix xd = Matrix::Zero(n, n);
  Matrix yd = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    xd(i, i) = static_cast<double>(i + 1);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) yd(i, j) = z(i, j) / static_cast<double>(i - j);
    }
  }
  const Matrix& r = prep.similarity;
  CommutatorSolution sol;
  sol.x = r.adjoint() * xd * r;
  sol.y = r.adjoint() * yd * r;
  sol.residual = (sol.x * sol.y - sol.y * sol.x - t0).norm();
  sol.similarityUsed = r;
  return sol;
}

}  // namespace posprod
