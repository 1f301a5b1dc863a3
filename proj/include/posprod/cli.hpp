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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "posprod/kernels.hpp"
#include "posprod/opcore.hpp"

namespace posprod::cli {

enum class ExitCode : int { Success = 0, InputError = 1, Obstruction = 2 };

struct RunConfig {
  std::string command;
  std::string inputPath;
  std::string outputPath;
  /// Command-specific key=value settings; each command rejects keys it does
  /// not know.
  std::map<std::string, std::string> params;
  std::uint64_t seed = 0;
  std::optional<double> tolerance;
  std::optional<int> summands;
  std::optional<Complex> lambda;
  std::optional<int> m;
  std::optional<kernels::Grid> grid;
};

/// Thrown for usage problems (bad flag values, unknown keys, missing paths).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// "2", "-1", "0.5,1" (re,im), "i", "-1+1i".
Complex parseComplex(const std::string& text);
/// "re0,re1,im0,im1,steps"
kernels::Grid parseGrid(const std::string& text);

/// Each run* writes its artifact and returns the exit code. Exceptions
/// escape; `run` maps them onto the exit-code contract.
ExitCode runDecompose(const RunConfig& config);
ExitCode runSpectrum(const RunConfig& config);
ExitCode runLudersDemo(const RunConfig& config);
ExitCode runOptimize(const RunConfig& config);
ExitCode runStudy(const RunConfig& config);
ExitCode runPseudospectrum(const RunConfig& config);

/// Dispatches on config.command. Diagnostics go to `err`.
int run(const RunConfig& config, std::ostream& err);

/// Full command line entry point.
int main(int argc, char** argv);

}  // namespace posprod::cli
