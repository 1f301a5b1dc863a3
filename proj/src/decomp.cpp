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

#include "posprod/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "decomp_internal.hpp"
#include "posprod/matrix_json.hpp"

namespace posprod {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string formatComplex(Complex z) {
  std::ostringstream out;
  out.precision(6);
  out << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return out.str();
}

Matrix blockDiagonal(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

bool isExactIdentity(const Matrix& s) {
  return s.rows() == s.cols() && s == Matrix::Identity(s.rows(), s.cols());
}

}  // namespace

SimilaritySummand SimilaritySummand::make(Matrix s, Matrix p, const Matrix* sInverse) {
  requireSquare(s, "SimilaritySummand(S)");
  requireSameShape(s, p, "SimilaritySummand");
  SimilaritySummand out;
  if (sInverse != nullptr) {
    out.value = s * p * (*sInverse);
  } else {
    out.value = s * p * Eigen::PartialPivLU<Matrix>(s).inverse();
  }
  out.conditionNumber = posprod::conditionNumber(s);
  out.s = std::move(s);
  out.p = std::move(p);
  return out;
}

std::string_view toString(ObstructionReason reason) {
  switch (reason) {
    case ObstructionReason::NonRealTrace:
      return "non-real-trace";
    case ObstructionReason::NonpositiveRealTrace:
      return "nonpositive-real-trace";
    case ObstructionReason::OddDimension:
      return "odd-dimension";
    case ObstructionReason::NotRepresentable:
      return "not-representable";
  }
  return "not-representable";
}

std::optional<ObstructionCertificate> obstruction(const Matrix& t, int m, double tol) {
  requireSquare(t, "obstruction");
  requireFinite(t, "obstruction");
  const Complex trace = t.trace();
  const double norm = opNorm(t);
  if (std::abs(trace.imag()) > tol * norm) {
    return ObstructionCertificate{
        ObstructionReason::NonRealTrace, trace,
        "trace(T) = " + formatComplex(trace) +
            " is not real. A matrix similar to a positive one has its trace equal to the sum "
            "of its eigenvalues, all in [0, inf); a finite sum of such matrices, and likewise "
            "any sum of products A_j B_j of positive semidefinite matrices, therefore has real "
            "nonnegative trace."};
  }
  if (norm > 0.0 && trace.real() <= 0.0) {
    return ObstructionCertificate{
        ObstructionReason::NonpositiveRealTrace, trace,
        "trace(T) = " + formatComplex(trace) +
            " is not positive while T != 0. Each matrix similar to a positive one has "
            "nonnegative trace, and trace zero only if it is zero (diagonalizable with all "
            "eigenvalues 0), so a sum of such matrices with trace <= 0 is the zero matrix."};
  }
  if (m == 1) {
    const PsdCertificate cert = similarToPositiveCheck(t, tol);
    if (!cert.certified()) {
      return ObstructionCertificate{
          ObstructionReason::NotRepresentable, trace,
          "a single summand S P S^{-1} is diagonalizable with spectrum in [0, inf); T is not: " +
              cert.diagnostic};
    }
  }
  return std::nullopt;
}

PositiveProduct toPositiveProduct(const Matrix& s, const Matrix& p, double conditionCap) {
  requireSquare(s, "toPositiveProduct(S)");
  requireSameShape(s, p, "toPositiveProduct");
  const double cond = conditionNumber(s);
  if (!(cond <= conditionCap)) throw SingularBlockError("S", cond);
  if (!isPsd(p)) throw NumericError("toPositiveProduct: P is not positive semidefinite");
  const Matrix sInv = Eigen::PartialPivLU<Matrix>(s).inverse();
  PositiveProduct out;
  out.a = hermitianPart(s * s.adjoint());
  out.b = hermitianPart(sInv.adjoint() * p * sInv);
  return out;
}

std::vector<double> distinctSpectrum(const Matrix& p, double tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitianPart(p), Eigen::EigenvaluesOnly);
  const auto& values = solver.eigenvalues();
  const double radius = tol * std::max(1.0, values.cwiseAbs().maxCoeff());
  std::vector<double> out;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (out.empty() || values(i) - out.back() > radius) out.push_back(values(i));
  }
  return out;
}

namespace {

double spectraGap(const std::vector<std::vector<double>>& spectra) {
  double gap = kInf;
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    for (std::size_t j = i + 1; j < spectra.size(); ++j) {
      for (double a : spectra[i]) {
        for (double b : spectra[j]) gap = std::min(gap, std::abs(a - b));
      }
    }
  }
  return gap;
}

PositiveProduct productFor(const SimilaritySummand& summand) {
  // A positive summand Q is the product Q * I.
  if (isExactIdentity(summand.s)) {
    return {hermitianPart(summand.p), Matrix::Identity(summand.p.rows(), summand.p.cols())};
  }
  return toPositiveProduct(summand.s, summand.p);
}

}  // namespace

// Fills the derived fields of a result from its summands.
void finalizeResult(const Matrix& t, DecompositionResult& result, const SpectralConfig& spectral) {
  Matrix total = Matrix::Zero(t.rows(), t.cols());
  std::vector<std::vector<double>> spectra;
  result.spectraPointCounts.clear();
  result.productForm.clear();
  result.certificates.clear();
  for (const auto& summand : result.summands) {
    total += summand.value;
    spectra.push_back(distinctSpectrum(summand.p));
    result.spectraPointCounts.push_back(static_cast<int>(spectra.back().size()));
    result.productForm.push_back(productFor(summand));
    result.certificates.push_back(similarToPositiveCheck(summand.value, spectral));
  }
  const double scale = t.norm();
  result.reconstructionResidual = scale > 0.0 ? (total - t).norm() / scale : (total - t).norm();
  result.pairwiseSpectraGap = spectraGap(spectra);
}

namespace {

struct TunedParameters {
  double delta = 0.0;
  double beta = 0.0;
  Matrix a1;
  std::array<double, 3> bScalars{};  // b_2, b_3, b_4
  double gap = 0.0;
};

std::vector<double> summandSpectrum(const std::vector<double>& a1Spectrum, double b) {
  std::vector<double> out = a1Spectrum;
  out.push_back(b);
  return out;
}

double separation(const std::vector<double>& a1Spectrum, double delta,
                  const std::array<double, 3>& b) {
  std::vector<std::vector<double>> spectra;
  spectra.push_back(summandSpectrum(a1Spectrum, 0.0));
  for (double bj : b) spectra.push_back({bj + delta, bj});
  return spectraGap(spectra);
}

TunedParameters tune(double traceRe, Eigen::Index k, const FourSummandParams& params) {
  const double kd = static_cast<double>(k);
  const double targetA1 = std::min(kd, traceRe / 2.0);
  double delta = 0.0, beta = 0.0, traceA1 = 0.0;
  if (params.delta && params.beta) {
    delta = *params.delta;
    beta = *params.beta;
    traceA1 = traceRe - (2.0 * beta + 3.0 * delta) * kd;
  } else if (params.delta) {
    delta = *params.delta;
    traceA1 = targetA1;
    beta = (traceRe - traceA1 - 3.0 * delta * kd) / (2.0 * kd);
  } else if (params.beta) {
    beta = *params.beta;
    traceA1 = targetA1;
    delta = (traceRe - traceA1 - 2.0 * beta * kd) / (3.0 * kd);
  } else {
    traceA1 = targetA1;
    delta = (traceRe - traceA1) / (6.0 * kd);
    beta = (traceRe - traceA1 - 3.0 * delta * kd) / (2.0 * kd);
  }
  std::ostringstream why;
  why.precision(6);
  if (!(delta > 0.0)) {
    why << "parameter tuning failed: delta = " << delta << " violates delta > 0";
    throw NumericError(why.str());
  }
  if (!(beta > 0.0)) {
    why << "parameter tuning failed: beta = " << beta << " violates beta > 0";
    throw NumericError(why.str());
  }
  if (!(traceA1 > 0.0)) {
    why << "parameter tuning failed: trace(a1) = Re trace(T) - (2 beta + 3 delta) k = " << traceA1
        << " violates trace(a1) > 0";
    throw NumericError(why.str());
  }

  TunedParameters out;
  out.delta = delta;
  out.beta = beta;
  std::vector<double> a1Spectrum;
  const Eigen::Index half = k / 2;
  if (params.a1Form == A1Form::TwoPoint && half > 0) {
    // tau (1 + p) with p a diagonal projection of rank floor(k/2)
    const double tau = traceA1 / static_cast<double>(k + half);
    out.a1 = Matrix::Identity(k, k) * tau;
    for (Eigen::Index i = 0; i < half; ++i) out.a1(i, i) = 2.0 * tau;
    a1Spectrum = {tau, 2.0 * tau};
  } else {
    const double tau = traceA1 / kd;
    out.a1 = Matrix::Identity(k, k) * tau;
    a1Spectrum = {tau};
  }

  const auto& w = params.bWeights;
  const double wsum = w[0] + w[1] + w[2];
  if (!(w[0] > 0 && w[1] > 0 && w[2] > 0) || std::abs(wsum - 1.0) > 1e-12) {
    throw NumericError("bWeights must be positive and sum to 1");
  }

  // Default split, then nudges of at most 10% per weight.
  std::vector<std::array<double, 3>> candidates{w};
  const std::array<std::array<double, 3>, 6> directions{{{1, -1, 0},
                                                         {-1, 1, 0},
                                                         {1, 0, -1},
                                                         {-1, 0, 1},
                                                         {0, 1, -1},
                                                         {0, -1, 1}}};
  for (int step = 1; step <= 5; ++step) {
    const double eps = 0.02 * step;
    for (const auto& d : directions) {
      std::array<double, 3> c{};
      double sum = 0.0;
      for (int j = 0; j < 3; ++j) {
        c[j] = w[j] * (1.0 + eps * d[j]);
        sum += c[j];
      }
      for (double& cj : c) cj /= sum;
      candidates.push_back(c);
    }
  }
  out.gap = -1.0;
  for (const auto& c : candidates) {
    const std::array<double, 3> b{c[0] * beta, c[1] * beta, c[2] * beta};
    const double gap = separation(a1Spectrum, delta, b);
    if (gap > out.gap) {
      out.gap = gap;
      out.bScalars = b;
    }
    if (gap >= params.sepMargin) break;
  }
  if (out.gap < params.sepMargin) {
    why << "parameter tuning failed: best spectral separation " << out.gap
        << " violates separation >= sepMargin = " << params.sepMargin;
    throw NumericError(why.str());
  }
  return out;
}

}  // namespace

DecompositionOutcome fourSummand(const Matrix& t, const FourSummandParams& params) {
  requireSquare(t, "fourSummand");
  requireFinite(t, "fourSummand");
  const Eigen::Index n = t.rows();
  if (n % 2 != 0) {
    return ObstructionCertificate{
        ObstructionReason::OddDimension, t.trace(),
        "the four-summand construction splits C^n as K + K and needs even n; got n = " +
            std::to_string(n) + ". Odd dimensions are rejected, not padded."};
  }
  if (auto cert = obstruction(t, 4, params.spectral.tol)) return *cert;

  const Eigen::Index k = n / 2;
  DecompositionResult result;
  result.method = "four-summand";
  if (opNorm(t) == 0.0) {
    for (int j = 0; j < 4; ++j) {
      result.summands.push_back(SimilaritySummand::make(Matrix::Identity(n, n), Matrix::Zero(n, n)));
    }
    finalizeResult(t, result, params.spectral);
    return result;
  }

  const TunedParameters tuned = tune(t.trace().real(), k, params);
  const double delta = tuned.delta;
  const double beta = tuned.beta;
  const Matrix& a1 = tuned.a1;
  const Matrix id = Matrix::Identity(k, k);

  const Matrix a = t.topLeftCorner(k, k);
  const Matrix b = t.topRightCorner(k, k);
  const Matrix c = t.bottomLeftCorner(k, k);
  const Matrix d = t.bottomRightCorner(k, k);

  // x4 y4 - y4 x4 = T0 := (A + D - a1 - 2 beta - 3 delta) / delta
  Matrix t0 = (a + d - a1 - (2.0 * beta + 3.0 * delta) * id) / delta;
  t0.diagonal().array() -= t0.trace() / static_cast<double>(k);
  const CommutatorSolution comm = commutatorSolve(t0, params.solver);
  Matrix x4 = comm.x;
  Matrix y4 = comm.y;
  // Centre x4 and balance the pair; both leave the commutator unchanged.
  x4.diagonal().array() -= static_cast<double>(k + 1) / 2.0;
  const double nx = x4.norm();
  const double ny = y4.norm();
  if (nx > 0.0 && ny > 0.0) {
    const double alpha = std::sqrt(ny / nx);
    x4 *= alpha;
    y4 /= alpha;
  }
  const Matrix x4y4 = x4 * y4;
  const Matrix y4x4 = y4 * x4;

  // (1,1): a1 + beta + 3 delta + delta (x3 + x4 y4) = A
  const Matrix x3 = (a - a1 - (beta + 3.0 * delta) * id) / delta - x4y4;
  // (1,2): -a1 x1 - delta (x3 + x4) = B
  const Matrix x1 = -a1.partialPivLu().solve(b + delta * (x3 + x4));
  // (2,1): delta (y2 + 1 + x3 + y4 + y4 x4 y4) = C
  const Matrix y2 = (c - delta * (id + x3 + y4 + y4x4 * y4)) / delta;

  const double scale = std::max(1.0, t.norm());
  result.commutatorResidual = comm.residual / std::max(1.0, t0.norm());
  // (2,2) follows from (1,1) and the commutator equation.
  result.blockIdentityResidual = (beta * id - delta * (x3 + y4x4) - d).norm() / scale;

  const Matrix zero = Matrix::Zero(k, k);
  const std::array<Matrix, 4> xs{x1, zero, x3, x4};
  const std::array<Matrix, 4> ys{zero, y2, id, y4};
  const std::array<double, 4> as{0.0, tuned.bScalars[0] + delta, tuned.bScalars[1] + delta,
                                 tuned.bScalars[2] + delta};
  const std::array<double, 4> bs{0.0, tuned.bScalars[0], tuned.bScalars[1], tuned.bScalars[2]};

  for (std::size_t j = 0; j < 4; ++j) {
    BlockMatrix2x2 sj{id, xs[j], ys[j], id + ys[j] * xs[j]};
    const Matrix sInv = blockInverse(sj, params.solver).assemble();
    const Matrix aj = j == 0 ? a1 : Matrix(as[j] * id);
    Matrix pj = blockDiagonal(aj, bs[j] * id);
    result.summands.push_back(SimilaritySummand::make(sj.assemble(), std::move(pj), &sInv));
  }
  finalizeResult(t, result, params.spectral);
  return result;
}

bool VerificationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

VerificationReport verifyDecomposition(const Matrix& t, const DecompositionResult& result,
                                       const VerifyOptions& options) {
  VerificationReport report;
  auto add = [&](std::string name, bool passed, double value, double threshold) {
    report.checks.push_back({std::move(name), passed, value, threshold});
  };
  Matrix total = Matrix::Zero(t.rows(), t.cols());
  std::vector<std::vector<double>> spectra;
  bool shapesOk = true;
  for (std::size_t j = 0; j < result.summands.size(); ++j) {
    const auto& summand = result.summands[j];
    const std::string tag = "summand[" + std::to_string(j) + "]";
    if (summand.s.rows() != t.rows() || summand.s.cols() != t.cols() ||
        summand.p.rows() != t.rows() || summand.p.cols() != t.cols()) {
      add(tag + ".shape", false, 0.0, 0.0);
      shapesOk = false;
      continue;
    }
    const double cond = conditionNumber(summand.s);
    const bool invertible = cond <= 1e12;
    add(tag + ".S-invertible", invertible, cond, 1e12);
    const bool psd = isPsd(summand.p, options.spectral.tol);
    add(tag + ".P-psd", psd, 0.0, options.spectral.tol);
    if (!invertible) {
      shapesOk = false;
      continue;
    }
    const Matrix value = summand.s * summand.p * Eigen::PartialPivLU<Matrix>(summand.s).inverse();
    total += value;
    const double vnorm = std::max(1.0, value.norm());
    const double cached = (summand.value.rows() == value.rows() && summand.value.cols() == value.cols())
                              ? (summand.value - value).norm() / vnorm
                              : kInf;
    add(tag + ".cached-value", cached <= options.tol, cached, options.tol);

    const PsdCertificate cert = similarToPositiveCheck(value, options.spectral);
    add(tag + ".similar-to-positive", cert.certified(), cert.witnessCondition,
        options.spectral.conditionCap);

    spectra.push_back(distinctSpectrum(summand.p));
    if (options.maxSpectrumPoints > 0) {
      const auto points = static_cast<double>(spectra.back().size());
      add(tag + ".spectrum-points", points <= options.maxSpectrumPoints, points,
          options.maxSpectrumPoints);
    }
    if (j < result.productForm.size()) {
      const auto& prod = result.productForm[j];
      const bool factorsPsd = prod.a.rows() == t.rows() && prod.b.rows() == t.rows() &&
                              isPsd(prod.a, options.spectral.tol) &&
                              isPsd(prod.b, options.spectral.tol);
      const double err = factorsPsd ? (prod.a * prod.b - value).norm() / vnorm : kInf;
      add(tag + ".product-form", factorsPsd && err <= options.tol, err, options.tol);
    }
  }
  if (shapesOk) {
    const double scale = t.norm();
    const double residual = scale > 0.0 ? (total - t).norm() / scale : (total - t).norm();
    add("reconstruction", residual <= options.tol, residual, options.tol);
  } else {
    add("reconstruction", false, kInf, options.tol);
  }
  if (options.minPairwiseGap > 0.0) {
    const double gap = spectraGap(spectra);
    add("pairwise-spectral-gap", gap >= options.minPairwiseGap, gap, options.minPairwiseGap);
  }
  return report;
}

nlohmann::json toJson(const PsdCertificate& certificate) {
  nlohmann::json out{{"kind", std::string(toString(certificate.kind))},
                     {"minEigenvalue", certificate.minEigenvalue},
                     {"witnessCondition", certificate.witnessCondition},
                     {"tolerance", certificate.tolerance}};
  out["diagonalizabilityGap"] = std::isfinite(certificate.diagonalizabilityGap)
                                    ? nlohmann::json(certificate.diagonalizabilityGap)
                                    : nlohmann::json(nullptr);
  if (!certificate.diagnostic.empty()) out["diagnostic"] = certificate.diagnostic;
  return out;
}

nlohmann::json toJson(const DecompositionResult& result) {
  nlohmann::json summands = nlohmann::json::array();
  for (const auto& s : result.summands) {
    summands.push_back({{"S", toJson(s.s)}, {"P", toJson(s.p)}, {"conditionNumber", s.conditionNumber}});
  }
  nlohmann::json products = nlohmann::json::array();
  for (const auto& p : result.productForm) products.push_back({{"A", toJson(p.a)}, {"B", toJson(p.b)}});
  nlohmann::json certificates = nlohmann::json::array();
  for (const auto& c : result.certificates) certificates.push_back(toJson(c));
  nlohmann::json out{{"type", "decomposition"},
                     {"method", result.method},
                     {"summands", std::move(summands)},
                     {"reconstructionResidual", result.reconstructionResidual},
                     {"spectraPointCounts", result.spectraPointCounts},
                     {"productForm", std::move(products)},
                     {"certificates", std::move(certificates)}};
  out["pairwiseSpectraGap"] = std::isfinite(result.pairwiseSpectraGap)
                                  ? nlohmann::json(result.pairwiseSpectraGap)
                                  : nlohmann::json(nullptr);
  if (result.commutatorResidual) out["commutatorResidual"] = *result.commutatorResidual;
  if (result.blockIdentityResidual) out["blockIdentityResidual"] = *result.blockIdentityResidual;
  return out;
}

nlohmann::json toJson(const ObstructionCertificate& certificate) {
  return {{"type", "obstruction"},
          {"reason", std::string(toString(certificate.reason))},
          {"traceValue", toJson(certificate.traceValue)},
          {"explanation", certificate.explanation}};
}

}  // namespace posprod
