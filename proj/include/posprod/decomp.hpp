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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "posprod/opcore.hpp"
#include "posprod/solvers.hpp"

namespace posprod {

/// S P S^{-1} with S invertible and P positive semidefinite.
struct SimilaritySummand {
  Matrix s;
  Matrix p;
  Matrix value;
  double conditionNumber = 1.0;

  /// Computes value from S, P and (when supplied) a precomputed S^{-1}.
  static SimilaritySummand make(Matrix s, Matrix p, const Matrix* sInverse = nullptr);
};

/// Positive semidefinite factors A, B of a product AB.
struct PositiveProduct {
  Matrix a;
  Matrix b;
};

enum class A1Form { Scalar, TwoPoint };

/// Knobs of the four-summand construction. delta is the common gap
/// a_j - b_j of the scalar summands, beta = b_2 + b_3 + b_4. Unset values
/// are auto-tuned from Re trace(T).
struct FourSummandParams {
  std::optional<double> delta;
  std::optional<double> beta;
  A1Form a1Form = A1Form::Scalar;
  std::array<double, 3> bWeights{0.2, 0.3, 0.5};
  /// Minimum distance between the spectra of distinct T_j.
  double sepMargin = 1e-3;
  SolverConfig solver;
  SpectralConfig spectral;
};

/// Settings for the three- and two-summand pipelines.
struct SearchConfig {
  double sepMargin = 1e-3;
  SolverConfig solver;
  SpectralConfig spectral;
  /// Random unitary re-conjugations tried when the (1,2) block is badly
  /// conditioned.
  int preprocessRetries = 8;
  double blockConditionCap = 1e6;
  /// Relative residual above which the constructive route counts as failed.
  double acceptResidual = 1e-6;
  bool allowSearch = true;
  std::uint64_t seed = 0;
  int restarts = 50;
  int maxIterations = 2000;
  double targetResidual = 1e-8;
};

struct DecompositionResult {
  /// "four-summand", "constructive", "psd-split", "similar-to-positive" or "search".
  std::string method;
  std::vector<SimilaritySummand> summands;
  /// ||sum of values - T||_F / max(||T||_F, tiny)
  double reconstructionResidual = 0.0;
  std::vector<int> spectraPointCounts;
  /// min over i != j of dist(sigma(P_i), sigma(P_j)).
  double pairwiseSpectraGap = 0.0;
  std::vector<PositiveProduct> productForm;
  std::vector<PsdCertificate> certificates;
  /// Four-summand only: relative residual of the commutator step and of the
  /// (2,2)-block identity that follows from the (1,1) and commutator equations.
  std::optional<double> commutatorResidual;
  std::optional<double> blockIdentityResidual;
};

enum class ObstructionReason { NonRealTrace, NonpositiveRealTrace, OddDimension, NotRepresentable };

std::string_view toString(ObstructionReason reason);

struct ObstructionCertificate {
  ObstructionReason reason = ObstructionReason::NotRepresentable;
  Complex traceValue;
  std::string explanation;
};

using DecompositionOutcome = std::variant<DecompositionResult, ObstructionCertificate>;

/// Trace obstruction for writing T as a sum of m matrices similar to
/// positive ones (m = 0 means "any m"). No certificate does not imply
/// feasibility.
std::optional<ObstructionCertificate> obstruction(const Matrix& t, int m = 0,
                                                  double tol = kDefaultTol);

DecompositionOutcome fourSummand(const Matrix& t, const FourSummandParams& params = {});
DecompositionOutcome threeSummand(const Matrix& t, const SearchConfig& config = {});
DecompositionOutcome twoSummand(const Matrix& t, const SearchConfig& config = {});

/// S P S^{-1} = (S S^*) ((S^{-1})^* P S^{-1}).
PositiveProduct toPositiveProduct(const Matrix& s, const Matrix& p, double conditionCap = 1e12);

using ProductsOutcome = std::variant<std::vector<PositiveProduct>, ObstructionCertificate>;

/// T = sum_j A_j B_j with A_j, B_j PSD, through the m-summand pipeline.
ProductsOutcome sumOfProducts(const Matrix& t, int m, const SearchConfig& config = {});

struct VerificationCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
};

struct VerificationReport {
  std::vector<VerificationCheck> checks;
  bool passed() const;
};

struct VerifyOptions {
  double tol = 1e-6;
  /// Upper bound on the number of distinct eigenvalues of each P_j (0 = skip).
  int maxSpectrumPoints = 0;
  /// Required distance between spectra of distinct P_j (0 = skip).
  double minPairwiseGap = 0.0;
  SpectralConfig spectral;
};

/// Recomputes every claim of a result from its S_j and P_j alone.
VerificationReport verifyDecomposition(const Matrix& t, const DecompositionResult& result,
                                       const VerifyOptions& options = {});

/// Distinct eigenvalues of a Hermitian P (clustered at radius tol*max(1,||P||)).
std::vector<double> distinctSpectrum(const Matrix& p, double tol = 1e-9);

nlohmann::json toJson(const DecompositionResult& result);
nlohmann::json toJson(const ObstructionCertificate& certificate);
nlohmann::json toJson(const PsdCertificate& certificate);

}  // namespace posprod
