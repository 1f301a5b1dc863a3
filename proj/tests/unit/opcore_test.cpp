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

#include <json.hpp>

#include "posprod/matrix_json.hpp"
#include "posprod/opcore.hpp"
#include "../support.hpp"

using namespace posprod;
using namespace posprod::testing;

namespace {

Matrix fromRows(std::initializer_list<std::initializer_list<Complex>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (const auto& v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

std::vector<Complex> sortedByReal(std::vector<Complex> v) {
  std::sort(v.begin(), v.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
  return v;
}

}  // namespace

TEST_SUITE("opcore") {

TEST_CASE("eig on small fixed matrices") {
  Matrix d = Matrix::Zero(3, 3);
  d.diagonal() << 1.0, 2.0, 3.0;
  const auto values = sortedByReal(eig(d).eigenvalues);
  REQUIRE(values.size() == 3);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(values[k] - Complex(k + 1.0)) < 1e-14);

  const auto nil = eig(fromRows({{0, 1}, {0, 0}}));
  CHECK(nil.eigenvalues.size() == 2);
  for (auto z : nil.eigenvalues) CHECK(std::abs(z) < 1e-12);
  CHECK(nil.isRealNonnegative);
}

TEST_CASE("eig agrees with characteristic polynomial roots") {
  Rng rng = streamRng(1, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix m = randomGaussian(rng, 5, 5);
    const auto fast = eig(m).eigenvalues;
    const auto oracle = charPolyEigenvalues(m);
    CHECK(multisetDistance(fast, oracle) <= 1e-8);
  }
}

TEST_CASE("eig rejects bad input") {
  CHECK_THROWS_AS(eig(Matrix::Zero(2, 3)), ShapeError);
  Matrix m = Matrix::Identity(2, 2);
  m(1, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(eig(m), ShapeError);
  CHECK_THROWS_AS(eig(Matrix(0, 0)), ShapeError);
}

TEST_CASE("spectrum report distance to R+") {
  const auto r = eig(fromRows({{Complex(-3, 4), 0}, {0, 1}}));
  CHECK(r.maxDistToRPlus == doctest::Approx(5.0));
  CHECK_FALSE(r.isRealNonnegative);
  CHECK(eig(Matrix::Identity(3, 3), 0.0).isRealNonnegative);
}

TEST_CASE("eig is invariant under similarity") {
  Rng rng = streamRng(1, 1);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = uniformInt(rng, 1, 16);
    const Matrix m = randomGaussian(rng, n, n);
    const Matrix u = randomWellConditioned(rng, n, 10.0);
    const Matrix similar = u * m * denseInverse(u);
    CHECK(multisetDistance(eig(m).eigenvalues, eig(similar).eigenvalues) <= 1e-7 * opNorm(m));
  }
}

TEST_CASE("isPsd") {
  CHECK(isPsd(Matrix::Identity(3, 3)));
  Matrix d = Matrix::Zero(2, 2);
  d.diagonal() << 1.0, -1e-3;
  CHECK_FALSE(isPsd(d, 1e-9));
  CHECK_FALSE(isPsd(fromRows({{1, 1}, {0, 1}})));
  CHECK_THROWS_AS(isPsd(Matrix::Zero(1, 2)), ShapeError);

  Rng rng = streamRng(1, 2);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = uniformInt(rng, 1, 8);
    const Matrix q = randomGaussian(rng, uniformInt(rng, 1, n), n);
    const Matrix a = q.adjoint() * q;
    const Matrix b = randomPsdAnyRank(rng, n);
    CHECK(isPsd(a));
    CHECK(isPsd(a + b));
  }
}

TEST_CASE("similarToPositiveCheck examples") {
  const auto upper = similarToPositiveCheck(fromRows({{1, 1}, {0, 2}}));
  CHECK((upper.kind == PsdKind::SimilarToPositive));
  REQUIRE(upper.witness.has_value());
  const Matrix& v = *upper.witness;
  const Matrix diag = denseInverse(v) * upper.subject * v;
  CHECK((diag - Matrix(diag.diagonal().asDiagonal())).norm() <= 1e-10);

  const auto nil = similarToPositiveCheck(fromRows({{0, 1}, {0, 0}}));
  CHECK((nil.kind == PsdKind::Neither));
  CHECK_FALSE(nil.diagnostic.empty());

  const auto neg = similarToPositiveCheck(fromRows({{-1, 0}, {0, 1}}));
  CHECK((neg.kind == PsdKind::Neither));

  CHECK((similarToPositiveCheck(Matrix::Identity(2, 2)).kind == PsdKind::PositiveSemidefinite));
}

TEST_CASE("similarToPositiveCheck accepts V D V^-1") {
  Rng rng = streamRng(1, 3);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = uniformInt(rng, 1, 16);
    std::vector<Complex> values(n);
    for (auto& z : values) z = uniformReal(rng, 0.0, 5.0);
    if (trial % 4 == 0) values[0] = 0.0;
    if (trial % 5 == 0 && n > 2) values[1] = values[2];
    const Matrix m = withEigenvalues(rng, values, uniformReal(rng, 1.0, 1e4));
    const auto cert = similarToPositiveCheck(m);
    CHECK_MESSAGE(cert.certified(), "n = " << n << ": " << cert.diagnostic);
    if (cert.kind == PsdKind::SimilarToPositive) {
      REQUIRE(cert.witness.has_value());
      const Matrix& w = *cert.witness;
      const Matrix d = denseInverse(w) * m * w;
      const Matrix dd = d.diagonal().real().cast<Complex>().asDiagonal();
      CHECK((w * dd * denseInverse(w) - m).norm() <= 1e-6 * m.norm());
    }
  }
}

TEST_CASE("hsInner") {
  CHECK(hsInner(Matrix::Identity(4, 4), Matrix::Identity(4, 4)) == Complex(4.0));
  Rng rng = streamRng(1, 4);
  const Matrix x = randomGaussian(rng, 3, 4);
  CHECK(std::abs(hsInner(x, x) - x.cwiseAbs2().sum()) < 1e-12);
  CHECK_THROWS_AS(hsInner(x, Matrix::Zero(4, 3)), ShapeError);

  for (int trial = 0; trial < 100; ++trial) {
    const Matrix a = randomGaussian(rng, 4, 4), b = randomGaussian(rng, 4, 4);
    const Complex xx = hsInner(a, a), yy = hsInner(b, b), xy = hsInner(a, b);
    CHECK(std::abs(xx.imag()) <= 1e-12 * xx.real());
    CHECK(xx.real() >= 0.0);
    CHECK(std::norm(xy) <= xx.real() * yy.real() * (1.0 + 1e-10));
    CHECK(std::abs(xy - std::conj(hsInner(b, a))) <= 1e-12 * std::abs(xx + yy));
  }
}

TEST_CASE("distToRPlus") {
  CHECK(distToRPlus(-1.0) == 1.0);
  CHECK(distToRPlus(Complex(0, 1)) == 1.0);
  CHECK(distToRPlus(Complex(-3, 4)) == 5.0);
  CHECK(distToRPlus(2.5) == 0.0);
}

TEST_CASE("multisetDistance uses an optimal matching") {
  const std::vector<Complex> a{0.0, 1.0, 1.0}, b{1.0, 0.0, 1.0};
  CHECK(multisetDistance(a, b) == 0.0);
  const std::vector<Complex> c{0.0, 1.0}, d{0.9, 1.1};
  CHECK(multisetDistance(c, d) == doctest::Approx(0.9));
  CHECK_THROWS_AS(multisetDistance({0.0, 1.0}, {0.0}), ShapeError);
}

TEST_CASE("clusterEigenvalues groups multiplicities") {
  const auto clusters = clusterEigenvalues({1.0, 1.0 + 1e-12, 2.0}, 1e-8);
  REQUIRE(clusters.size() == 2);
  std::size_t total = 0;
  for (const auto& c : clusters) total += c.multiplicity;
  CHECK(total == 3);
}

TEST_CASE("matrix JSON round trip is bit exact") {
  Rng rng = streamRng(1, 5);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix m = randomGaussian(rng, uniformInt(rng, 1, 5), uniformInt(rng, 1, 5)) / 7.0;
    m(0, 0) = Complex(-0.0, std::numeric_limits<double>::min());
    const Matrix back = matrixFromJson(nlohmann::json::parse(toJson(m).dump()));
    CHECK(bitEqual(m, back));
  }
}

TEST_CASE("matrix JSON errors name the field") {
  auto message = [](const char* text) {
    try {
      matrixFromJson(nlohmann::json::parse(text), "T");
    } catch (const FormatError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message(R"({"cols": 1, "entries": [[1, 0]]})").find("T.rows") != std::string::npos);
  CHECK(message(R"({"rows": 1, "cols": 2, "entries": [[1, 0]]})").find("T.entries") !=
        std::string::npos);
  CHECK(message(R"({"rows": 1, "cols": 1, "entries": [[1]]})").find("T.entries[0]") !=
        std::string::npos);
  CHECK(message(R"({"rows": 1, "cols": 1, "entries": [["x", 0]]})").find("T.entries[0]") !=
        std::string::npos);
  CHECK(message(R"([1, 2])").find("T") != std::string::npos);
}

}  // TEST_SUITE
