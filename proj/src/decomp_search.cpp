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

// Three- and two-summand pipelines. The constructive route brings T to the
// block form [[A, W], [C, 0]] with W unitary, takes b = eps*I and
// c = A - eps*I, decomposes c recursively into summands similar to positive
// ones, and recovers the remaining blocks from two Sylvester equations. When
// that fails the PSD-factor search of the lab module takes over.

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "decomp_internal.hpp"
#include "posprod/decomp.hpp"
#include "posprod/lab.hpp"
#include "posprod/random.hpp"

namespace posprod {

namespace {

struct Piece {
  Matrix s;
  Matrix p;
};

Matrix inverseOf(const Matrix& m) { return Eigen::PartialPivLU<Matrix>(m).inverse(); }

Matrix valueOf(const Piece& piece) { return piece.s * piece.p * inverseOf(piece.s); }

Matrix blockDiag(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

Matrix assemble(const Matrix& u, const Matrix& x, const Matrix& y, const Matrix& z) {
  Matrix out(u.rows() + y.rows(), u.cols() + x.cols());
  out << u, x, y, z;
  return out;
}

// m equal shares of a matrix similar to a positive one.
std::optional<std::vector<Piece>> shares(const Matrix& t, int m, const SpectralConfig& spectral) {
  const Eigen::Index n = t.rows();
  const auto md = static_cast<double>(m);
  if (isPsd(t, spectral.tol)) {
    return std::vector<Piece>(static_cast<std::size_t>(m),
                              Piece{Matrix::Identity(n, n), hermitianPart(t) / md});
  }
  const PsdCertificate cert = similarToPositiveCheck(t, spectral);
  if (!cert.certified()) return std::nullopt;
  Eigen::VectorXcd d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = std::max(cert.spectrum[static_cast<std::size_t>(i)], 0.0) / md;
  return std::vector<Piece>(static_cast<std::size_t>(m), Piece{*cert.witness, Matrix(d.asDiagonal())});
}

std::vector<double> bWeights(int m) {
  if (m == 2) return {0.4, 0.6};
  return {0.2, 0.3, 0.5};
}

double residualOf(const Matrix& t, const std::vector<Piece>& pieces) {
  Matrix total = -t;
  for (const auto& piece : pieces) total += valueOf(piece);
  return total.norm() / std::max(t.norm(), std::numeric_limits<double>::min());
}

std::optional<std::vector<Piece>> constructive(const Matrix& t, int m, const SearchConfig& config,
                                               Rng& rng, int depth) {
  if (auto direct = shares(t, m, config.spectral)) return direct;
  const Eigen::Index n = t.rows();
  if (n % 2 != 0 || depth > 16) return std::nullopt;
  const double traceRe = t.trace().real();
  if (!(traceRe > 0.0)) return std::nullopt;

  const Eigen::Index k = n / 2;
  const Matrix id = Matrix::Identity(k, k);
  const std::vector<double> weights = bWeights(m);
  const std::array<double, 7> ladder{0.5, 0.3, 0.7, 0.2, 0.8, 0.1, 0.9};

  for (int attempt = 0; attempt <= config.preprocessRetries; ++attempt) {
    const Matrix u = attempt == 0 ? Matrix::Identity(n, n) : randomUnitary(rng, n);
    const Matrix t1 = u.adjoint() * t * u;
    const Matrix b1 = t1.topRightCorner(k, k);
    if (!(conditionNumber(b1) <= config.blockConditionCap)) continue;

    // [[1, 0], [y, 1]] with y = -D B^{-1} clears the (2,2) block.
    const Matrix y = -t1.bottomRightCorner(k, k) * inverseOf(b1);
    const Matrix l = assemble(id, Matrix::Zero(k, k), y, id);
    const Matrix lInv = assemble(id, Matrix::Zero(k, k), -y, id);
    // B = W H (polar); diag(1, H) turns the (1,2) block into W.
    Eigen::JacobiSVD<Matrix> svd(b1, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Matrix& sv = svd.matrixV();
    const Eigen::VectorXcd sigma = svd.singularValues().cast<Complex>();
    const Matrix h = sv * sigma.asDiagonal() * sv.adjoint();
    const Matrix hInv = sv * sigma.cwiseInverse().asDiagonal() * sv.adjoint();
    const Matrix g = blockDiag(id, h);
    const Matrix gInv = blockDiag(id, hInv);

    const Matrix r = g * l * u.adjoint();
    const Matrix rInv = u * lInv * gInv;
    const Matrix t3 = r * t * rInv;
    const Matrix a = t3.topLeftCorner(k, k);
    const Matrix w = t3.topRightCorner(k, k);
    const Matrix c = t3.bottomLeftCorner(k, k);
    const Matrix wInv = inverseOf(w);
    const double aScale = a.trace().real() / static_cast<double>(k);
    if (!(aScale > 0.0)) continue;

    for (double theta : ladder) {
      const double eps = theta * aScale;
      Matrix reduced = a - eps * id;
      reduced.diagonal().array() -= Complex(0.0, reduced.trace().imag() / static_cast<double>(k));
      auto inner = constructive(reduced, m, config, rng, depth + 1);
      if (!inner) continue;

      std::vector<Matrix> cs;
      Matrix cSum = Matrix::Zero(k, k);
      double sep = std::numeric_limits<double>::infinity();
      for (int j = 0; j < m; ++j) {
        cs.push_back(valueOf((*inner)[static_cast<std::size_t>(j)]));
        cSum += cs.back();
        if (j < 2) {
          for (double lambda : distinctSpectrum((*inner)[static_cast<std::size_t>(j)].p)) {
            sep = std::min(sep, std::abs(lambda - eps * weights[static_cast<std::size_t>(j)]));
          }
        }
      }
      if (sep < config.sepMargin * std::max(1.0, aScale)) continue;

      const Matrix b1j = eps * weights[0] * id;
      const Matrix b2j = eps * weights[1] * id;
      const Matrix b3j = m == 3 ? Matrix(eps * weights[2] * id) : Matrix::Zero(k, k);
      const Matrix c3 = m == 3 ? cs[2] : Matrix::Zero(k, k);

      try {
        // B v = c - A, and with s = 0:  b1 w - w c1 = C - v (A - c3) - b3 v - v B v
        const Matrix v = wInv * (cSum - a);
        const Matrix rhs = c - v * (a - c3) - b3j * v - v * w * v;
        const Matrix wsol = sylvesterSolve(b1j, cs[0], rhs, config.solver);
        const Matrix v1 = v - wsol;
        const Matrix v2 = v;
        // c2 x2 - x2 b2 = s2 = -B
        const Matrix x2 = sylvesterSolve(cs[1], b2j, -w, config.solver);

        const Piece& in1 = (*inner)[0];
        const Piece& in2 = (*inner)[1];
        std::vector<Piece> out;
        out.push_back({rInv * assemble(in1.s, Matrix::Zero(k, k), v1 * in1.s, id),
                       blockDiag(in1.p, b1j)});
        out.push_back({rInv * assemble(in2.s, x2, v2 * in2.s, id + v2 * x2),
                       blockDiag(in2.p, b2j)});
        if (m == 3) {
          const Piece& in3 = (*inner)[2];
          out.push_back({rInv * blockDiag(in3.s, id), blockDiag(in3.p, b3j)});
        }
        if (residualOf(t, out) <= config.acceptResidual) return out;
      } catch (const NumericError&) {
        continue;
      }
    }
  }
  return std::nullopt;
}

SimilaritySummand fromProduct(const PositiveProduct& f) {
  auto roots = [](const Matrix& m, double floor) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitianPart(m));
    const Eigen::VectorXd lambda = es.eigenvalues().cwiseMax(floor);
    const Matrix& q = es.eigenvectors();
    const Matrix root = q * lambda.cwiseSqrt().cast<Complex>().asDiagonal() * q.adjoint();
    const Matrix rootInv = q * lambda.cwiseSqrt().cwiseInverse().cast<Complex>().asDiagonal() * q.adjoint();
    return std::pair<Matrix, Matrix>{root, rootInv};
  };
  auto conditioned = [](const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitianPart(m), Eigen::EigenvaluesOnly);
    const auto& e = es.eigenvalues();
    return e(e.size() - 1) > 0.0 && e(0) >= 1e-8 * e(e.size() - 1);
  };
  if (conditioned(f.a)) {
    // A B = A^{1/2} (A^{1/2} B A^{1/2}) A^{-1/2}
    const auto [root, rootInv] = roots(f.a, 0.0);
    return SimilaritySummand::make(root, hermitianPart(root * f.b * root), &rootInv);
  }
  if (conditioned(f.b)) {
    // A B = B^{-1/2} (B^{1/2} A B^{1/2}) B^{1/2}
    const auto [root, rootInv] = roots(f.b, 0.0);
    return SimilaritySummand::make(rootInv, hermitianPart(root * f.a * root), &root);
  }
  const double floor = 1e-8 * std::max(opNorm(f.a), std::numeric_limits<double>::min());
  const auto [root, rootInv] = roots(f.a, floor);
  return SimilaritySummand::make(root, hermitianPart(root * f.b * root), &rootInv);
}

DecompositionOutcome fewSummands(const Matrix& t, int m, const SearchConfig& config) {
  requireSquare(t, m == 3 ? "threeSummand" : "twoSummand");
  requireFinite(t, m == 3 ? "threeSummand" : "twoSummand");
  if (auto cert = obstruction(t, m, config.spectral.tol)) return *cert;
  const Eigen::Index n = t.rows();
  DecompositionResult result;

  auto finish = [&](std::string method, const std::vector<Piece>& pieces) {
    result.method = std::move(method);
    for (const auto& piece : pieces) result.summands.push_back(SimilaritySummand::make(piece.s, piece.p));
    finalizeResult(t, result, config.spectral);
    return result;
  };

  if (opNorm(t) == 0.0) {
    return finish("similar-to-positive",
                  std::vector<Piece>(static_cast<std::size_t>(m),
                                     Piece{Matrix::Identity(n, n), Matrix::Zero(n, n)}));
  }
  if (isPsd(t, config.spectral.tol)) {
    const Matrix h = hermitianPart(t);
    if (m == 2) {
      // T = (T - lambda_min) + lambda_min
      Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
      const double low = std::max(es.eigenvalues()(0), 0.0);
      Matrix top = h;
      top.diagonal().array() -= low;
      return finish("psd-split", {Piece{Matrix::Identity(n, n), projectPsd(top)},
                                  Piece{Matrix::Identity(n, n), low * Matrix::Identity(n, n)}});
    }
    return finish("psd-split", *shares(t, m, config.spectral));
  }
  if (auto direct = shares(t, m, config.spectral)) return finish("similar-to-positive", *direct);

  Rng rng = streamRng(config.seed, 0x5eed);
  if (auto pieces = constructive(t, m, config, rng, 0)) return finish("constructive", *pieces);

  if (!config.allowSearch) {
    throw NumericError("constructive " + std::to_string(m) +
                       "-summand route failed and search fallback is disabled");
  }
  OptimizationConfig opt;
  opt.m = m;
  opt.restarts = config.restarts;
  opt.maxIterations = config.maxIterations;
  opt.seed = config.seed;
  opt.targetResidual = config.targetResidual;
  const OptimizationTrace trace = optimizeSumOfProducts(t, opt);
  result.method = "search";
  for (const auto& f : trace.finalFactors) result.summands.push_back(fromProduct(f));
  finalizeResult(t, result, config.spectral);
  return result;
}

}  // namespace

DecompositionOutcome threeSummand(const Matrix& t, const SearchConfig& config) {
  return fewSummands(t, 3, config);
}

DecompositionOutcome twoSummand(const Matrix& t, const SearchConfig& config) {
  return fewSummands(t, 2, config);
}

ProductsOutcome sumOfProducts(const Matrix& t, int m, const SearchConfig& config) {
  DecompositionOutcome outcome;
  switch (m) {
    case 2:
      outcome = twoSummand(t, config);
      break;
    case 3:
      outcome = threeSummand(t, config);
      break;
    case 4: {
      FourSummandParams params;
      params.sepMargin = config.sepMargin;
      params.solver = config.solver;
      params.spectral = config.spectral;
      outcome = fourSummand(t, params);
      break;
    }
    default:
      throw std::invalid_argument("sumOfProducts: m must be 2, 3 or 4");
  }
  if (auto* cert = std::get_if<ObstructionCertificate>(&outcome)) return *cert;
  return std::get<DecompositionResult>(outcome).productForm;
}

}  // namespace posprod
