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

#include <doctest.h>

#include "posprod/solvers.hpp"
#include "../support.hpp"

using namespace posprod;
using namespace posprod::testing;

namespace {

Matrix scalar(Complex v) { return Matrix::Constant(1, 1, v); }

}  // namespace

TEST_SUITE("solvers") {

TEST_CASE("blockInverse small examples") {
  BlockMatrix2x2 diag{scalar(2), scalar(0), scalar(0), scalar(3)};
  const Matrix inv = blockInverse(diag).assemble();
  CHECK(std::abs(inv(0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(inv(1, 1) - 1.0 / 3.0) < 1e-15);
  CHECK(std::abs(inv(0, 1)) == 0.0);

  BlockMatrix2x2 ones{scalar(1), scalar(1), scalar(1), scalar(2)};
  Matrix expected(2, 2);
  expected << 2.0, -1.0, -1.0, 1.0;
  CHECK((blockInverse(ones).assemble() - expected).norm() < 1e-14);
}

TEST_CASE("blockInverse matches dense inversion") {
  Rng rng = streamRng(2, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = uniformInt(rng, 2, 32);
    const Matrix s = randomWellConditioned(rng, n, 50.0);
    const auto parts = BlockMatrix2x2::split(s, uniformInt(rng, 1, n - 1));
    CHECK((parts.assemble() - s).norm() == 0.0);
    const Matrix inv = blockInverse(parts).assemble();
    const Matrix dense = denseInverse(s);
    CHECK((inv - dense).norm() <= 1e-9 * dense.norm());
  }
}

TEST_CASE("blockInverse reports the singular block") {
  BlockMatrix2x2 singularU{scalar(0), scalar(1), scalar(1), scalar(0)};
  try {
    blockInverse(singularU);
    FAIL("expected SingularBlockError");
  } catch (const SingularBlockError& e) {
    CHECK(e.block() == "u");
  }
  BlockMatrix2x2 singularD{scalar(1), scalar(1), scalar(1), scalar(1)};
  try {
    blockInverse(singularD);
    FAIL("expected SingularBlockError");
  } catch (const SingularBlockError& e) {
    CHECK(e.block() != "u");
  }
  BlockMatrix2x2 bad{Matrix::Identity(2, 2), Matrix::Zero(2, 1), Matrix::Zero(2, 2),
                     Matrix::Identity(1, 1)};
  CHECK_THROWS_AS(blockInverse(bad), ShapeError);
}

TEST_CASE("sylvesterSolve small examples") {
  CHECK(std::abs(sylvesterSolve(scalar(2), scalar(0), scalar(4))(0, 0) - 2.0) < 1e-15);
  Matrix a = Matrix::Zero(2, 2);
  a.diagonal() << 1.0, 2.0;
  const Matrix x = sylvesterSolve(a, scalar(0), Matrix::Ones(2, 1));
  CHECK(std::abs(x(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(x(1, 0) - 0.5) < 1e-15);
}

TEST_CASE("sylvesterSolve matches the vectorized oracle") {
  Rng rng = streamRng(2, 1);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = uniformInt(rng, 1, 12), m = uniformInt(rng, 1, 12);
    Matrix a = randomGaussian(rng, n, n) / std::sqrt(4.0 * n);
    a.diagonal().array() += 2.0;
    const Matrix b = randomGaussian(rng, m, m) / std::sqrt(4.0 * m);
    const Matrix c = randomGaussian(rng, n, m);
    const Matrix x = sylvesterSolve(a, b, c);
    CHECK((a * x - x * b - c).norm() <= 1e-8 * std::max(1.0, c.norm()));
    CHECK((x - sylvesterByKronecker(a, b, c)).norm() <= 1e-8 * x.norm());
  }
}

TEST_CASE("sylvesterSolve refuses overlapping spectra") {
  Matrix a = Matrix::Zero(2, 2);
  a.diagonal() << 1.0, 3.0;
  try {
    sylvesterSolve(a, scalar(3.0 + 1e-9), Matrix::Ones(2, 1));
    FAIL("expected SpectralOverlapError");
  } catch (const SpectralOverlapError& e) {
    CHECK(std::abs(e.fromA() - Complex(3.0)) < 1e-12);
  }
  CHECK_THROWS_AS(sylvesterSolve(a, scalar(0), Matrix::Ones(3, 1)), ShapeError);
}

TEST_CASE("zeroDiagonalize") {
  Matrix swap(2, 2);
  swap << 0.0, 1.0, 1.0, 0.0;
  const auto same = zeroDiagonalize(swap);
  CHECK(same.similarity.isIdentity());
  CHECK(same.zeroDiagonal == swap);

  Matrix pm = Matrix::Zero(2, 2);
  pm.diagonal() << 1.0, -1.0;
  const auto z = zeroDiagonalize(pm);
  CHECK(z.zeroDiagonal.diagonal().cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((z.similarity * pm * denseInverse(z.similarity) - z.zeroDiagonal).norm() <= 1e-12);

  Rng rng = streamRng(2, 2);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = uniformInt(rng, 1, 16);
    const Matrix t0 = randomWithTrace(rng, n, 0.0);
    const auto r = zeroDiagonalize(t0);
    const double scale = std::max(1.0, t0.norm());
    CHECK(r.zeroDiagonal.diagonal().cwiseAbs().maxCoeff() <= 1e-10 * scale);
    CHECK((r.similarity * t0 * denseInverse(r.similarity) - r.zeroDiagonal).norm() <=
          1e-10 * scale);
    // The similarity is unitary.
    CHECK((r.similarity.adjoint() * r.similarity - Matrix::Identity(n, n)).norm() <= 1e-12 * n);
  }
  CHECK_THROWS_AS(zeroDiagonalize(Matrix::Identity(2, 2)), TraceError);
}

TEST_CASE("commutatorSolve examples") {
  const auto zero = commutatorSolve(Matrix::Zero(3, 3));
  CHECK(zero.residual == 0.0);

  Matrix nil = Matrix::Zero(2, 2);
  nil(0, 1) = 1.0;
  const auto n1 = commutatorSolve(nil);
  CHECK((n1.x * n1.y - n1.y * n1.x - nil).norm() <= 1e-12);

  Matrix pm = Matrix::Zero(2, 2);
  pm.diagonal() << 1.0, -1.0;
  const auto d = commutatorSolve(pm);
  CHECK(d.residual <= 1e-10);
  CHECK((d.x * d.y - d.y * d.x - pm).norm() <= 1e-10);
}

TEST_CASE("commutatorSolve properties") {
  Rng rng = streamRng(2, 3);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = uniformInt(rng, 2, 16);
    const Matrix t0 = randomWithTrace(rng, n, 0.0) * uniformReal(rng, 0.1, 10.0);
    const auto sol = commutatorSolve(t0);
    const Matrix comm = sol.x * sol.y - sol.y * sol.x;
    CHECK(sol.residual <= 1e-8 * std::max(1.0, t0.norm()));
    CHECK(std::abs(comm.trace()) <= 1e-12 * opNorm(sol.x) * opNorm(sol.y) + 1e-14);

    const Complex shift = std::polar(1e-6 * t0.norm() * uniformReal(rng, 1.5, 10.0) / n,
                                     uniformReal(rng, 0.0, 6.28));
    CHECK_THROWS_AS(commutatorSolve(t0 + shift * Matrix::Identity(n, n)), TraceError);
  }
}

TEST_CASE("commutatorSolve explains the trace obstruction") {
  try {
    commutatorSolve(Matrix::Identity(2, 2));
    FAIL("expected TraceError");
  } catch (const TraceError& e) {
    CHECK(std::string(e.what()).find("trace") != std::string::npos);
    CHECK(std::abs(e.trace() - Complex(2.0)) < 1e-15);
  }
}

}  // TEST_SUITE
