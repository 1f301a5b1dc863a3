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

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "posprod/opcore.hpp"

namespace posprod {

/// Malformed input document; the message names the offending field.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// {"rows": r, "cols": c, "entries": [[re, im], ...]} in row-major order.
nlohmann::json toJson(const Matrix& m);
nlohmann::json toJson(Complex z);

Matrix matrixFromJson(const nlohmann::json& doc, std::string_view field = "matrix");
Complex complexFromJson(const nlohmann::json& doc, std::string_view field);

nlohmann::json readJsonFile(const std::filesystem::path& path);
void writeJsonFile(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace posprod
