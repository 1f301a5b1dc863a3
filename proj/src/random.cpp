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

#include "posprod/random.hpp"

#include <Eigen/QR>

namespace posprod {

Rng streamRng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

Matrix randomGaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(i, j) = {re, im};
    }
  }
  return m;
}

Matrix randomUnitary(Rng& rng, Eigen::Index n) {
  Eigen::HouseholderQR<Matrix> qr(randomGaussian(rng, n, n));
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

Matrix randomPsd(Rng& rng, Eigen::Index n, double lo, double hi) {
  std::uniform_real_distribution<double> uniform(lo, hi);
  const Matrix u = randomUnitary(rng, n);
  Eigen::VectorXcd d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = uniform(rng);
  Matrix p = u * d.asDiagonal() * u.adjoint();
  return hermitianPart(p);
}

Matrix randomWellConditioned(Rng& rng, Eigen::Index n, double maxCond) {
  std::uniform_real_distribution<double> uniform(1.0, maxCond);
  const Matrix u = randomUnitary(rng, n);
  const Matrix w = randomUnitary(rng, n);
  Eigen::VectorXcd s(n);
  for (Eigen::Index i = 0; i < n; ++i) s(i) = uniform(rng);
  s(0) = 1.0;
  if (n > 1) s(n - 1) = maxCond;
  return u * s.asDiagonal() * w.adjoint();
}

}  // namespace posprod
