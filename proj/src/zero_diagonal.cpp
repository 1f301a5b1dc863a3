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

// Unitary reduction of a trace-zero matrix to zero diagonal. At each level a
// unit vector v with <T v, v> = 0 is located inside the numerical range and
// completed to a unitary basis; the trailing block keeps trace zero.

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/QR>

#include "posprod/solvers.hpp"

namespace posprod {

namespace {

double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }

// Distance from the origin to the segment [a, b].
double segmentDistance(Complex a, Complex b) {
  const Complex d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(a);
  const double s = std::clamp(-(std::conj(d) * a).real() / len2, 0.0, 1.0);
  return std::abs(a + s * d);
}

// Unit vector in span{x1, x2} (orthonormal) whose Rayleigh quotient is the
// point of [q(x1), q(x2)] closest to target. With x = x1 + t e^{i phi} x2,
// the phase phi makes the cross term collinear with the segment and t solves a
// real quadratic.
Vector steerInPlane(const Matrix& t, const Vector& x1, const Vector& x2, Complex target) {
  const Vector tx1 = t * x1;
  const Vector tx2 = t * x2;
  const Complex p1 = x1.dot(tx1);
  const Complex p2 = x2.dot(tx2);
  const Complex c12 = x1.dot(tx2);
  const Complex c21 = x2.dot(tx1);

  const Complex d = p2 - p1;
  const double len = std::abs(d);
  if (len == 0.0) return x1;
  const double s = std::clamp((std::conj(d) * (target - p1)).real() / (len * len), 0.0, 1.0);
  if (s == 0.0) return x1;
  if (s == 1.0) return x2;

  const Complex rot = std::conj(d) / len;
  const double a = -s * len;          // rotated q(x1) - mu
  const double b = (1.0 - s) * len;   // rotated q(x2) - mu
  const Complex r12 = rot * c12;
  const Complex r21 = rot * c21;
  const double phi = std::atan2(-(r12.imag() + r21.imag()), r12.real() - r21.real());
  const Complex e = std::polar(1.0, phi);
  const double c = (e * r12 + std::conj(e) * r21).real();

  // b t^2 + c t + a = 0 with a < 0 < b; take the root of smaller magnitude.
  const double disc = std::sqrt(c * c - 4.0 * a * b);
  const double q = -0.5 * (c + std::copysign(disc, c));
  double root = a / q;
  const double other = q / b;
  if (std::abs(other) < std::abs(root)) root = other;
  Vector v = x1 + (root * e) * x2;
  return v / v.norm();
}

// Unit vector v with <T v, v> as close to 0 as the diagonal of T allows.
Vector isotropicVector(const Matrix& t, double tiny) {
  const Eigen::Index n = t.rows();
  const Vector diag = t.diagonal();
  auto unit = [n](Eigen::Index i) {
    Vector e = Vector::Zero(n);
    e(i) = 1.0;
    return e;
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(diag(i)) <= tiny) return unit(i);
  }

  // The mean of the diagonal is 0, so 0 lies on a segment or in a triangle
  // spanned by diagonal entries.
  double bestPair = std::numeric_limits<double>::infinity();
  Eigen::Index pp = 0, pq = std::min<Eigen::Index>(1, n - 1);
  for (Eigen::Index p = 0; p < n; ++p) {
    for (Eigen::Index q = p + 1; q < n; ++q) {
      const double dist = segmentDistance(diag(p), diag(q));
      if (dist < bestPair) {
        bestPair = dist;
        pp = p;
        pq = q;
      }
    }
  }
  if (bestPair <= tiny) return steerInPlane(t, unit(pp), unit(pq), 0.0);

  for (Eigen::Index p = 0; p < n; ++p) {
    for (Eigen::Index q = p + 1; q < n; ++q) {
      for (Eigen::Index r = q + 1; r < n; ++r) {
        const double s1 = cross(diag(p), diag(q));
        const double s2 = cross(diag(q), diag(r));
        const double s3 = cross(diag(r), diag(p));
        const bool inside = (s1 >= 0 && s2 >= 0 && s3 >= 0) || (s1 <= 0 && s2 <= 0 && s3 <= 0);
        if (!inside) continue;
        // Point on [d_p, d_q] collinear with 0 and d_r, on the far side of 0.
        const double denom = cross(diag(p), diag(r)) - cross(diag(q), diag(r));
        const double s = denom == 0.0 ? 0.0 : std::clamp(cross(diag(p), diag(r)) / denom, 0.0, 1.0);
        const Complex m = diag(p) + s * (diag(q) - diag(p));
        const Vector y = steerInPlane(t, unit(p), unit(q), m);
        return steerInPlane(t, y, unit(r), 0.0);
      }
    }
  }
  // Rounding pushed 0 just outside the hull; settle for the nearest segment.
  return steerInPlane(t, unit(pp), unit(pq), 0.0);
}

}  // namespace

ZeroDiagonalization zeroDiagonalize(const Matrix& t0, const SolverConfig& config) {
  requireSquare(t0, "zeroDiagonalize");
  requireFinite(t0, "zeroDiagonalize");
  const double scale = std::max(1.0, t0.norm());
  const Complex trace = t0.trace();
  if (std::abs(trace) > config.traceTol * scale) {
    throw TraceError("zeroDiagonalize: a matrix similar to a zero-diagonal one has zero trace",
                     trace);
  }
  const Eigen::Index n = t0.rows();
  ZeroDiagonalization out{Matrix::Identity(n, n), t0};
  const double tiny = 1e-14 * scale;
  if (out.zeroDiagonal.diagonal().cwiseAbs().maxCoeff() <= tiny) return out;

  for (Eigen::Index level = 0; level + 1 < n; ++level) {
    const Eigen::Index m = n - level;
    const Matrix block = out.zeroDiagonal.bottomRightCorner(m, m);
    if (std::abs(block(0, 0)) <= tiny) continue;
    const Vector v = isotropicVector(block, tiny);
    Eigen::HouseholderQR<Matrix> qr(v);
    const Matrix q = qr.householderQ();  // first column is v up to phase
    // Z <- Q^* Z Q on the trailing block; R <- Q^* R on the trailing rows.
    out.zeroDiagonal.bottomRightCorner(m, m) = q.adjoint() * block * q;
    out.zeroDiagonal.topRightCorner(level, m) = out.zeroDiagonal.topRightCorner(level, m) * q;
    out.zeroDiagonal.bottomLeftCorner(m, level) =
        q.adjoint() * out.zeroDiagonal.bottomLeftCorner(m, level);
    out.similarity.bottomRows(m) = q.adjoint() * out.similarity.bottomRows(m);
  }
  return out;
}

}  // namespace posprod
