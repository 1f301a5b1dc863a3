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

#include "posprod/luders.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace posprod {

ElementaryOperator buildElementary(std::vector<CoefficientPair> pairs, double tol) {
  if (pairs.empty()) throw ShapeError("buildElementary: empty coefficient list");
  const Eigen::Index n = pairs.front().first.rows();
  for (const auto& [a, b] : pairs) {
    if (n == 0 || a.rows() != n || a.cols() != n || b.rows() != n || b.cols() != n) {
      throw ShapeError("buildElementary: coefficients must all be square of one size");
    }
    requireFinite(a, "buildElementary");
    requireFinite(b, "buildElementary");
  }
  ElementaryOperator op;
  op.isLuders = std::all_of(pairs.begin(), pairs.end(), [tol](const CoefficientPair& p) {
    return (p.first - p.second).norm() <= tol * std::max(1.0, p.first.norm()) &&
           isPsd(p.first, tol);
  });
  op.pairs = std::move(pairs);
  return op;
}

ElementaryOperator buildLuders(const std::vector<Matrix>& coefficients, double tol) {
  std::vector<CoefficientPair> pairs;
  for (const auto& a : coefficients) pairs.emplace_back(a, a);
  return buildElementary(std::move(pairs), tol);
}

Matrix apply(const ElementaryOperator& op, const Matrix& x) {
  const Eigen::Index n = op.dimension();
  if (x.rows() != n || x.cols() != n) {
    throw ShapeError("apply: operand must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  Matrix out = Matrix::Zero(n, n);
  for (const auto& [a, b] : op.pairs) out += a * x * b;
  return out;
}

Vector vec(const Matrix& x) { return Eigen::Map<const Vector>(x.data(), x.size()); }

Matrix unvec(const Vector& v, Eigen::Index n) {
  if (v.size() != n * n) throw ShapeError("unvec: length is not n^2");
  return Eigen::Map<const Matrix>(v.data(), n, n);
}

Matrix vectorize(const ElementaryOperator& op, Execution execution) {
  return execution == Execution::Serial ? kernels::serial::kronSum(op.pairs)
                                        : kernels::omp::kronSum(op.pairs);
}

SpectrumReport spectrum(const ElementaryOperator& op, double tol) {
  return eig(vectorize(op), tol);
}

namespace {

bool commutes(const Matrix& a, const Matrix& b, double tol) {
  return (a * b - b * a).norm() <= tol * std::max(1.0, a.norm() * b.norm());
}

}  // namespace

HsPositivity psdOnHS(const ElementaryOperator& op, double tol) {
  const Matrix m = vectorize(op);
  HsPositivity out;
  const double scale = std::max(1.0, opNorm(m));
  out.hermitianDefect = opNorm(m - m.adjoint()) / scale;
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitianPart(m));
  out.minEigenvalue = es.eigenvalues()(0) / scale;

  std::ostringstream diag;
  out.coefficientsPsd = true;
  for (std::size_t j = 0; j < op.pairs.size(); ++j) {
    const bool aPsd = isPsd(op.pairs[j].first);
    const bool bPsd = isPsd(op.pairs[j].second);
    if (!aPsd) diag << "A_" << j + 1 << " is not PSD; ";
    if (!bPsd) diag << "B_" << j + 1 << " is not PSD; ";
    out.coefficientsPsd = out.coefficientsPsd && aPsd && bPsd;
  }

  PsdCertificate& cert = out.certificate;
  cert.subject = m;
  cert.tolerance = tol;
  cert.minEigenvalue = es.eigenvalues()(0);
  if (out.hermitianDefect <= tol && out.minEigenvalue >= -tol) {
    cert.kind = PsdKind::PositiveSemidefinite;
    cert.witness = es.eigenvectors();
    cert.spectrum.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    cert.witnessCondition = 1.0;
  } else {
    cert.kind = PsdKind::Neither;
    diag << "vectorized operator: hermitian defect " << out.hermitianDefect
         << ", min eigenvalue of hermitian part " << out.minEigenvalue << " (relative)";
  }
  cert.diagnostic = diag.str();

  if (op.pairs.size() == 2 && out.coefficientsPsd) {
    const auto& [a1, b1] = op.pairs[0];
    const auto& [a2, b2] = op.pairs[1];
    if (commutes(a1, a2, 1e-12) || commutes(b1, b2, 1e-12)) {
      out.commutingSideDistToRPlus = eig(m).maxDistToRPlus;
    }
  }
  return out;
}

EigenvalueRejected::EigenvalueRejected(Complex lambda, double bound)
    : NumericError([&] {
        std::ostringstream msg;
        msg.precision(17);
        msg << "lambda = (" << lambda.real() << ", " << lambda.imag()
            << ") is not in [0, inf): in finite dimension trace(sum A_j B_j) >= 0 for PSD "
               "factors, so ||sum A_j B_j - lambda I|| >= dist(lambda, [0, inf)) = "
            << bound << "; bound = " << bound;
        return msg.str();
      }()),
      lambda_(lambda),
      bound_(bound) {}

LudersDemo eigenvalueDemo(Complex lambda, const std::vector<PositiveProduct>& products) {
  const double bound = residualLowerBound(lambda);
  if (bound > 0.0) throw EigenvalueRejected(lambda, bound);
  if (products.empty()) throw ShapeError("eigenvalueDemo: no product pairs supplied");
  const Eigen::Index k = products.front().a.rows();
  Matrix sum = Matrix::Zero(k, k);
  for (const auto& p : products) {
    if (p.a.rows() != k || p.a.cols() != k || p.b.rows() != k || p.b.cols() != k) {
      throw ShapeError("eigenvalueDemo: product factors must all be square of one size");
    }
    if (!isPsd(p.a) || !isPsd(p.b)) throw NumericError("eigenvalueDemo: product factor is not PSD");
    sum += p.a * p.b;
  }
  sum.diagonal().array() -= lambda;
  const double gap = opNorm(sum);
  if (gap > 1e-8 * std::max(1.0, std::abs(lambda))) {
    std::ostringstream msg;
    msg << "eigenvalueDemo: ||sum A_j B_j - lambda I|| = " << gap << " exceeds 1e-8";
    throw NumericError(msg.str());
  }

  LudersDemo demo;
  demo.lambda = lambda;
  std::vector<Matrix> blocks;
  for (const auto& p : products) {
    Matrix t = Matrix::Zero(2 * k, 2 * k);
    t.topLeftCorner(k, k) = p.a;
    t.bottomRightCorner(k, k) = p.b;
    blocks.push_back(std::move(t));
  }
  demo.blockCoefficients = blocks;
  demo.op = buildLuders(blocks);
  demo.eigenvector = Matrix::Zero(2 * k, 2 * k);
  demo.eigenvector.topRightCorner(k, k) = Matrix::Identity(k, k);
  // T_j X0 T_j = [[0, A_j B_j], [0, 0]]
  demo.eigenResidual = (posprod::apply(demo.op, demo.eigenvector) - lambda * demo.eigenvector).norm();
  return demo;
}

std::vector<kernels::PseudoPoint> pseudospectrum(const ElementaryOperator& op,
                                                 const kernels::Grid& grid, Execution execution) {
  if (grid.steps <= 0) throw ShapeError("pseudospectrum: empty grid");
  for (double v : {grid.re0, grid.re1, grid.im0, grid.im1}) {
    if (!std::isfinite(v)) throw ShapeError("pseudospectrum: grid bounds must be finite");
  }
  const Matrix m = vectorize(op, execution);
  return execution == Execution::Serial ? kernels::serial::pseudospectrum(m, grid)
                                        : kernels::omp::pseudospectrum(m, grid);
}

std::string pseudospectrumCsv(const std::vector<kernels::PseudoPoint>& points) {
  std::string out = "re,im,sigma_min\n";
  for (const auto& p : points) {
    out += formatDouble(p.re) + ',' + formatDouble(p.im) + ',' + formatDouble(p.sigmaMin) + '\n';
  }
  return out;
}

}  // namespace posprod
