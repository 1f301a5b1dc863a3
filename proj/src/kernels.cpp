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

#include "posprod/kernels.hpp"

#include <Eigen/SVD>

namespace posprod::kernels {

Complex Grid::point(std::size_t k) const {
  const auto steps_ = static_cast<std::size_t>(steps);
  const std::size_t a = k / steps_;
  const std::size_t b = k % steps_;
  const double denom = steps > 1 ? static_cast<double>(steps - 1) : 1.0;
  return {re0 + (re1 - re0) * static_cast<double>(a) / denom,
          im0 + (im1 - im0) * static_cast<double>(b) / denom};
}

double sigmaMin(const Matrix& m, Complex lambda) {
  Matrix shifted = m;
  shifted.diagonal().array() -= lambda;
  Eigen::BDCSVD<Matrix> svd(shifted);
  const auto& s = svd.singularValues();
  return s(s.size() - 1);
}

namespace {

// Column c = k + n l of sum_p B_p^T (x) A_p; entry (i + n j) is
// sum_p B_p(l, j) A_p(i, k).
void kronColumn(std::span<const CoefficientPair> pairs, Eigen::Index n, Eigen::Index c,
                Matrix& out) {
  const Eigen::Index k = c % n;
  const Eigen::Index l = c / n;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      Complex acc = 0.0;
      for (const auto& [a, b] : pairs) acc += b(l, j) * a(i, k);
      out(i + n * j, c) = acc;
    }
  }
}

Eigen::Index checkedDimension(std::span<const CoefficientPair> pairs) {
  if (pairs.empty()) throw ShapeError("kronSum: empty coefficient list");
  const Eigen::Index n = pairs.front().first.rows();
  for (const auto& [a, b] : pairs) {
    if (a.rows() != n || a.cols() != n || b.rows() != n || b.cols() != n) {
      throw ShapeError("kronSum: coefficients must all be square of one size");
    }
  }
  return n;
}

}  // namespace

namespace serial {

Matrix kronSum(std::span<const CoefficientPair> pairs) {
  const Eigen::Index n = checkedDimension(pairs);
  Matrix out(n * n, n * n);
  for (Eigen::Index c = 0; c < n * n; ++c) kronColumn(pairs, n, c, out);
  return out;
}

std::vector<PseudoPoint> pseudospectrum(const Matrix& m, const Grid& grid) {
  std::vector<PseudoPoint> out(grid.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const Complex z = grid.point(k);
    out[k] = {z.real(), z.imag(), sigmaMin(m, z)};
  }
  return out;
}

}  // namespace serial

namespace omp {

Matrix kronSum(std::span<const CoefficientPair> pairs) {
  const Eigen::Index n = checkedDimension(pairs);
  const Eigen::Index cols = n * n;
  Matrix out(cols, cols);
#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < cols; ++c) kronColumn(pairs, n, c, out);
  return out;
}

std::vector<PseudoPoint> pseudospectrum(const Matrix& m, const Grid& grid) {
  const auto count = static_cast<long>(grid.size());
  std::vector<PseudoPoint> out(grid.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long k = 0; k < count; ++k) {
    const Complex z = grid.point(static_cast<std::size_t>(k));
    out[static_cast<std::size_t>(k)] = {z.real(), z.imag(), sigmaMin(m, z)};
  }
  return out;
}

}  // namespace omp

}  // namespace posprod::kernels
