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

#include <span>
#include <utility>
#include <vector>

#include "posprod/opcore.hpp"

// Data-parallel kernels behind the elementary-operator and pseudospectrum
// surfaces. Every OpenMP kernel has a serial twin computing the same values
// in the same order; tests compare the two bit for bit.

namespace posprod::kernels {

using CoefficientPair = std::pair<Matrix, Matrix>;

/// Rectangle [re0, re1] x [im0, im1] sampled with `steps` points per axis,
/// endpoints included.
struct Grid {
  double re0 = 0.0, re1 = 0.0, im0 = 0.0, im1 = 0.0;
  int steps = 1;

  std::size_t size() const { return static_cast<std::size_t>(steps) * steps; }
  /// Point k, real coordinate varying slowest.
  Complex point(std::size_t k) const;
};

struct PseudoPoint {
  double re = 0.0;
  double im = 0.0;
  double sigmaMin = 0.0;
};

namespace serial {
/// sum_j B_j^T (x) A_j, the column-stacking matrix of X -> sum_j A_j X B_j.
Matrix kronSum(std::span<const CoefficientPair> pairs);
std::vector<PseudoPoint> pseudospectrum(const Matrix& m, const Grid& grid);
}  // namespace serial

namespace omp {
Matrix kronSum(std::span<const CoefficientPair> pairs);
std::vector<PseudoPoint> pseudospectrum(const Matrix& m, const Grid& grid);
}  // namespace omp

/// Smallest singular value of (m - lambda I).
double sigmaMin(const Matrix& m, Complex lambda);

}  // namespace posprod::kernels
