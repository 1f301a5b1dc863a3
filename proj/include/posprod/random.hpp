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
#include <random>

#include "posprod/opcore.hpp"

namespace posprod {

using Rng = std::mt19937_64;

/// Independent generator for stream `index` of a seeded family.
Rng streamRng(std::uint64_t seed, std::uint64_t index);

/// Entries with independent standard normal real and imaginary parts.
Matrix randomGaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols);
/// Haar-distributed unitary.
Matrix randomUnitary(Rng& rng, Eigen::Index n);
/// U diag(d) U^* with d uniform in [lo, hi].
Matrix randomPsd(Rng& rng, Eigen::Index n, double lo, double hi);
/// U diag(s) W^* with singular values in [1, maxCond], both extremes attained.
Matrix randomWellConditioned(Rng& rng, Eigen::Index n, double maxCond);

}  // namespace posprod
