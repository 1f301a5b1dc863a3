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

#include "posprod/matrix_json.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace posprod {

nlohmann::json toJson(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

nlohmann::json toJson(const Matrix& m) {
  nlohmann::json entries = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) entries.push_back(toJson(m(i, j)));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

Complex complexFromJson(const nlohmann::json& doc, std::string_view field) {
  const std::string name(field);
  if (doc.is_number()) return {doc.get<double>(), 0.0};
  if (!doc.is_array() || doc.size() != 2 || !doc[0].is_number() || !doc[1].is_number()) {
    throw FormatError("field '" + name + "': expected [re, im] pair of numbers");
  }
  const Complex z{doc[0].get<double>(), doc[1].get<double>()};
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw FormatError("field '" + name + "': non-finite value");
  }
  return z;
}

Matrix matrixFromJson(const nlohmann::json& doc, std::string_view field) {
  const std::string name(field);
  if (!doc.is_object()) throw FormatError("field '" + name + "': expected an object");
  for (const char* key : {"rows", "cols", "entries"}) {
    if (!doc.contains(key)) throw FormatError("field '" + name + "." + key + "': missing");
  }
  const auto& rows = doc["rows"];
  const auto& cols = doc["cols"];
  if (!rows.is_number_integer() || rows.get<long long>() <= 0) {
    throw FormatError("field '" + name + ".rows': expected a positive integer");
  }
  if (!cols.is_number_integer() || cols.get<long long>() <= 0) {
    throw FormatError("field '" + name + ".cols': expected a positive integer");
  }
  const auto r = rows.get<Eigen::Index>();
  const auto c = cols.get<Eigen::Index>();
  const auto& entries = doc["entries"];
  if (!entries.is_array() || static_cast<Eigen::Index>(entries.size()) != r * c) {
    throw FormatError("field '" + name + ".entries': expected an array of rows*cols = " +
                      std::to_string(r * c) + " [re, im] pairs");
  }
  Matrix m(r, c);
  for (Eigen::Index k = 0; k < r * c; ++k) {
    m(k / c, k % c) = complexFromJson(entries[static_cast<std::size_t>(k)],
                                      name + ".entries[" + std::to_string(k) + "]");
  }
  return m;
}

nlohmann::json readJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return nlohmann::json::parse(buffer.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void writeJsonFile(const std::filesystem::path& path, const nlohmann::json& doc) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  out << doc.dump(2) << '\n';
}

}  // namespace posprod
