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

#include "posprod/opcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace posprod {

void requireSquare(const Matrix& m, std::string_view what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw ShapeError(std::string(what) + ": expected a non-empty square matrix, got " +
                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void requireFinite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) {
    throw ShapeError(std::string(what) + ": matrix has non-finite entries");
  }
}

void requireSameShape(const Matrix& a, const Matrix& b, std::string_view what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(what) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
  }
}

double opNorm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double conditionNumber(const Matrix& m) {
  Eigen::BDCSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

Matrix hermitianPart(const Matrix& m) { return (m + m.adjoint()) * 0.5; }

double distToRPlus(Complex lambda) {
  const double re = std::min(lambda.real(), 0.0);
  return std::hypot(re, lambda.imag());
}

Complex hsInner(const Matrix& x, const Matrix& y) {
  requireSameShape(x, y, "hsInner");
  // trace(Y^* X) = sum conj(y_ij) x_ij
  return y.conjugate().cwiseProduct(x).sum();
}

SpectrumReport eig(const Matrix& m, double tol) {
  requireSquare(m, "eig");
  requireFinite(m, "eig");
  Eigen::ComplexEigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericError("eig: eigenvalue iteration did not converge");
  }
  SpectrumReport report;
  const auto& values = solver.eigenvalues();
  report.eigenvalues.assign(values.data(), values.data() + values.size());
  for (Complex v : report.eigenvalues) {
    report.maxDistToRPlus = std::max(report.maxDistToRPlus, distToRPlus(v));
  }
  report.tolerance = tol * opNorm(m);
  report.isRealNonnegative = report.maxDistToRPlus <= report.tolerance;
  return report;
}

bool isPsd(const Matrix& m, double tol) {
  requireSquare(m, "isPsd");
  requireFinite(m, "isPsd");
  const double norm = opNorm(m);
  if (norm == 0.0) return true;
  const Matrix skew = m - m.adjoint();
  if (opNorm(skew) > tol * norm) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitianPart(m), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0) >= -tol * norm;
}

std::string_view toString(PsdKind kind) {
  switch (kind) {
    case PsdKind::PositiveSemidefinite:
      return "positive-semidefinite";
    case PsdKind::SimilarToPositive:
      return "similar-to-positive";
    case PsdKind::Neither:
      return "neither";
  }
  return "neither";
}

std::vector<EigenCluster> clusterEigenvalues(const std::vector<Complex>& values, double radius) {
  // single linkage via union-find
  const std::size_t n = values.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(values[i] - values[j]) <= radius) parent[find(i)] = find(j);
    }
  }
  std::vector<EigenCluster> clusters;
  std::vector<std::size_t> slot(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find(i);
    if (slot[root] == n) {
      slot[root] = clusters.size();
      clusters.push_back({});
    }
    auto& c = clusters[slot[root]];
    c.center += values[i];
    ++c.multiplicity;
  }
  for (auto& c : clusters) c.center /= static_cast<double>(c.multiplicity);
  return clusters;
}

PsdCertificate similarToPositiveCheck(const Matrix& m, double tol) {
  SpectralConfig config;
  config.tol = tol;
  return similarToPositiveCheck(m, config);
}

PsdCertificate similarToPositiveCheck(const Matrix& m, const SpectralConfig& config) {
  requireSquare(m, "similarToPositiveCheck");
  requireFinite(m, "similarToPositiveCheck");
  const Eigen::Index n = m.rows();

  PsdCertificate cert;
  cert.subject = m;
  cert.tolerance = config.tol;
  cert.diagonalizabilityGap = std::numeric_limits<double>::infinity();

  const double norm = opNorm(m);
  if (norm == 0.0) {
    cert.kind = PsdKind::SimilarToPositive;
    cert.witness = Matrix::Identity(n, n);
    cert.spectrum.assign(static_cast<std::size_t>(n), 0.0);
    cert.witnessCondition = 1.0;
    return cert;
  }

  if (isPsd(m, config.tol)) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitianPart(m));
    cert.kind = PsdKind::PositiveSemidefinite;
    cert.witness = es.eigenvectors();
    cert.witnessCondition = 1.0;
    cert.minEigenvalue = es.eigenvalues()(0);
    cert.spectrum.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      cert.diagonalizabilityGap = std::min(cert.diagonalizabilityGap,
                                           es.eigenvalues()(i + 1) - es.eigenvalues()(i));
    }
    return cert;
  }

  const SpectrumReport spectrum = eig(m, config.tol);
  const auto clusters = clusterEigenvalues(spectrum.eigenvalues, config.clusterTol * norm);

  cert.minEigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& c : clusters) cert.minEigenvalue = std::min(cert.minEigenvalue, c.center.real());
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    for (std::size_t j = i + 1; j < clusters.size(); ++j) {
      cert.diagonalizabilityGap =
          std::min(cert.diagonalizabilityGap, std::abs(clusters[i].center - clusters[j].center));
    }
  }

  for (const auto& c : clusters) {
    if (distToRPlus(c.center) > config.tol * norm) {
      cert.diagnostic = "eigenvalue (" + std::to_string(c.center.real()) + ", " +
                        std::to_string(c.center.imag()) + ") lies off [0, inf)";
      return cert;
    }
  }

  // Largest distance from an eigenvalue to the real diagonal entry standing in for it.
  double spread = 0.0;
  for (const auto& z : spectrum.eigenvalues) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& c : clusters) nearest = std::min(nearest, std::abs(z - c.center.real()));
    spread = std::max(spread, nearest);
  }

  Matrix basis(n, n);
  Eigen::Index column = 0;
  for (const auto& c : clusters) {
    const Matrix shifted = m - c.center * Matrix::Identity(n, n);
    Eigen::BDCSVD<Matrix> svd(shifted, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const auto mult = static_cast<Eigen::Index>(c.multiplicity);
    const double worst = s(n - mult);
    if (worst > config.nullTol * norm) {
      cert.diagnostic = "eigenvalue (" + std::to_string(c.center.real()) + ", " +
                        std::to_string(c.center.imag()) + ") has algebraic multiplicity " +
                        std::to_string(mult) + " but a smaller eigenspace (singular value " +
                        std::to_string(worst / norm) + " relative)";
      return cert;
    }
    basis.middleCols(column, mult) = svd.matrixV().rightCols(mult);
    for (Eigen::Index k = 0; k < mult; ++k) cert.spectrum.push_back(c.center.real());
    column += mult;
  }

  cert.witnessCondition = conditionNumber(basis);
  if (!(cert.witnessCondition <= config.conditionCap)) {
    cert.diagnostic = "eigenvector basis condition number " + std::to_string(cert.witnessCondition) +
                      " exceeds cap " + std::to_string(config.conditionCap);
    cert.spectrum.clear();
    return cert;
  }

  Eigen::VectorXcd diag(n);
  for (Eigen::Index i = 0; i < n; ++i) diag(i) = cert.spectrum[static_cast<std::size_t>(i)];
  const Matrix rebuilt = basis * diag.asDiagonal() * basis.inverse();
  // Rounding in the basis and the rounded diagonal are both amplified by cond(V).
  const double floor = cert.witnessCondition *
                       (64.0 * std::numeric_limits<double>::epsilon() + 4.0 * spread / norm);
  cert.tolerance = std::max(config.tol, floor);
  const double reconstruction = opNorm(rebuilt - m);
  if (reconstruction > cert.tolerance * norm) {
    std::ostringstream msg;
    msg << "witness reconstruction error " << reconstruction / norm << " relative exceeds "
        << cert.tolerance;
    cert.diagnostic = msg.str();
    cert.spectrum.clear();
    return cert;
  }

  cert.kind = PsdKind::SimilarToPositive;
  cert.witness = std::move(basis);
  return cert;
}

namespace {

// Perfect matching in the bipartite graph {(i, j) : |a_i - b_j| <= threshold}.
bool hasPerfectMatching(const std::vector<Complex>& a, const std::vector<Complex>& b,
                        double threshold) {
  const std::size_t n = a.size();
  std::vector<std::size_t> matchOfB(n, n);
  std::vector<char> visited;
  auto augment = [&](auto&& self, std::size_t i) -> bool {
    for (std::size_t j = 0; j < n; ++j) {
      if (visited[j] || std::abs(a[i] - b[j]) > threshold) continue;
      visited[j] = 1;
      if (matchOfB[j] == n || self(self, matchOfB[j])) {
        matchOfB[j] = i;
        return true;
      }
    }
    return false;
  };
  for (std::size_t i = 0; i < n; ++i) {
    visited.assign(n, 0);
    if (!augment(augment, i)) return false;
  }
  return true;
}

}  // namespace

double multisetDistance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  if (a.size() != b.size()) {
    throw ShapeError("multisetDistance: multisets of different size");
  }
  if (a.empty()) return 0.0;
  auto byReal = [](Complex x, Complex y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  };
  std::vector<Complex> sa(a), sb(b);
  std::sort(sa.begin(), sa.end(), byReal);
  std::sort(sb.begin(), sb.end(), byReal);
  double upper = 0.0;
  for (std::size_t i = 0; i < sa.size(); ++i) upper = std::max(upper, std::abs(sa[i] - sb[i]));

  std::vector<double> candidates;
  for (Complex x : sa) {
    for (Complex y : sb) {
      const double d = std::abs(x - y);
      if (d <= upper) candidates.push_back(d);
    }
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  std::size_t lo = 0, hi = candidates.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (hasPerfectMatching(sa, sb, candidates[mid])) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return candidates[lo];
}

}  // namespace posprod
