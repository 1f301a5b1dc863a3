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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "posprod/decomp.hpp"
#include "posprod/opcore.hpp"

namespace posprod {

enum class StepRule { Fixed, Backtracking };
enum class Execution { Serial, Parallel };

struct OptimizationConfig {
  int m = 2;
  int maxIterations = 2000;
  int restarts = 50;
  StepRule stepRule = StepRule::Backtracking;
  std::uint64_t seed = 0;
  double targetResidual = 1e-8;
  /// A restart stops once the residual improved by less than this relative
  /// amount over `stallWindow` sweeps.
  double stallTolerance = 1e-10;
  int stallWindow = 100;
  Execution execution = Execution::Parallel;
};

struct OptimizationTrace {
  /// Normalized residual ||sum A_j B_j - T||_F / sqrt(n), one entry per sweep
  /// of the returned restart (entry 0 is the initial point).
  std::vector<double> residualHistory;
  std::vector<PositiveProduct> finalFactors;
  double bestResidual = 0.0;
  int bestRestart = 0;
  /// residualLowerBound(lambda) when T = lambda I.
  std::optional<double> boundFloor;
};

/// For T = lambda I:  trace(sum A_j B_j) >= 0 for PSD factors, and
/// |trace E| <= sqrt(n) ||E||_F, so ||sum A_j B_j - lambda I||_F / sqrt(n)
/// >= |trace(sum A_j B_j) - n lambda| / n >= dist(lambda, [0, inf)).
/// The same bound holds in operator norm.
double residualLowerBound(Complex lambda);

/// ||e||_F / sqrt(rows).
double normalizedResidual(const Matrix& e);

/// Frobenius-nearest PSD matrix: Hermitian part with negative eigenvalues
/// clipped to zero.
Matrix projectPsd(const Matrix& m);

/// Alternating minimization of ||sum_j A_j B_j - T||_F over PSD factors.
OptimizationTrace optimizeSumOfProducts(const Matrix& t, const OptimizationConfig& config);

/// Is T a scalar multiple of the identity (to rounding)?  Returns the scalar.
std::optional<Complex> scalarValue(const Matrix& t);

struct ExperimentRecord {
  int n = 0;
  double traceMargin = 0.0;
  int trial = 0;
  double maxCondS = 0.0;
  double residual = 0.0;
  bool success = false;
};

/// Runs the four-summand pipeline on random T with Re trace(T) = margin * n.
std::vector<ExperimentRecord> conditionStudy(const std::vector<int>& sizes,
                                             const std::vector<double>& traceMargins,
                                             int trials, std::uint64_t seed,
                                             Execution execution = Execution::Parallel);

/// n,trace_margin,trial,max_cond_S,residual,success
std::string studyCsv(const std::vector<ExperimentRecord>& records);
/// iteration,residual
std::string traceCsv(const OptimizationTrace& trace);

/// Round-trip decimal representation (17 significant digits).
std::string formatDouble(double value);

}  // namespace posprod
