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

#include "posprod/lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "posprod/random.hpp"

namespace posprod {

double residualLowerBound(Complex lambda) { return distToRPlus(lambda); }

double normalizedResidual(const Matrix& e) {
  return e.norm() / std::sqrt(static_cast<double>(std::max<Eigen::Index>(e.rows(), 1)));
}

Matrix projectPsd(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitianPart(m));
  const Eigen::VectorXd clipped = solver.eigenvalues().cwiseMax(0.0);
  const Matrix& v = solver.eigenvectors();
  return hermitianPart(v * clipped.cast<Complex>().asDiagonal() * v.adjoint());
}

std::optional<Complex> scalarValue(const Matrix& t) {
  if (t.rows() != t.cols() || t.rows() == 0) return std::nullopt;
  const Complex lambda = t.trace() / static_cast<double>(t.rows());
  Matrix diff = t;
  diff.diagonal().array() -= lambda;
  if (diff.norm() <= 1e-14 * std::max(1.0, t.norm())) return lambda;
  return std::nullopt;
}

namespace {

struct RestartResult {
  std::vector<double> history;
  std::vector<PositiveProduct> factors;
  double residual = std::numeric_limits<double>::infinity();
};

// min ||X b - r||_F, regularized normal equations.
Matrix solveLeft(const Matrix& r, const Matrix& b) {
  Matrix gram = b * b.adjoint();
  const double mu = 1e-12 * std::max(gram.norm(), 1e-300);
  gram.diagonal().array() += mu;
  // X gram = r b^*  <=>  gram^* X^* = b r^*
  return gram.adjoint().ldlt().solve(b * r.adjoint()).adjoint();
}

// min ||a X - r||_F
Matrix solveRight(const Matrix& a, const Matrix& r) {
  Matrix gram = a.adjoint() * a;
  const double mu = 1e-12 * std::max(gram.norm(), 1e-300);
  gram.diagonal().array() += mu;
  return gram.ldlt().solve(a.adjoint() * r);
}

class Restart {
 public:
  Restart(const Matrix& t, const OptimizationConfig& config, Rng rng)
      : t_(t), config_(config), rng_(std::move(rng)), n_(t.rows()) {}

  RestartResult run() {
    initialize();
    RestartResult out;
    const double norm = std::sqrt(static_cast<double>(n_));
    out.history.push_back(std::sqrt(current_) / norm);
    for (int iter = 0; iter < config_.maxIterations; ++iter) {
      for (std::size_t j = 0; j < factors_.size(); ++j) {
        updateLeft(j);
        updateRight(j);
      }
      const double residual = std::sqrt(current_) / norm;
      if (residual > out.history.back()) {
        throw std::logic_error("optimizeSumOfProducts: residual increased");
      }
      out.history.push_back(residual);
      if (residual <= config_.targetResidual) break;
      const auto window = static_cast<std::size_t>(config_.stallWindow);
      if (out.history.size() > window) {
        const double before = out.history[out.history.size() - 1 - window];
        if (before - residual <= config_.stallTolerance * before) break;
      }
    }
    out.residual = out.history.back();
    out.factors = factors_;
    return out;
  }

 private:
  void initialize() {
    const auto m = static_cast<double>(config_.m);
    const double target = std::max(t_.norm() / std::sqrt(static_cast<double>(n_)), 1e-3);
    const double scale = std::sqrt(target / m);
    factors_.clear();
    for (int j = 0; j < config_.m; ++j) {
      Matrix ga = randomGaussian(rng_, n_, n_);
      Matrix gb = randomGaussian(rng_, n_, n_);
      Matrix a = hermitianPart(ga * ga.adjoint()) / static_cast<double>(n_);
      Matrix b = hermitianPart(gb * gb.adjoint()) / static_cast<double>(n_);
      a *= scale / std::max(opNorm(a), 1e-300);
      b *= scale / std::max(opNorm(b), 1e-300);
      factors_.push_back({std::move(a), std::move(b)});
    }
    Matrix e = -t_;
    for (const auto& f : factors_) e += f.a * f.b;
    current_ = e.squaredNorm();
  }

  Matrix others(std::size_t skip) const {
    Matrix s = Matrix::Zero(n_, n_);
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      if (i != skip) s += factors_[i].a * factors_[i].b;
    }
    return s;
  }

  // Tries the projected least-squares step, then projected gradient steps;
  // keeps the factor unless the objective does not increase.
  template <typename Eval, typename Gradient>
  void improve(Matrix& x, const Matrix& lsCandidate, double lipschitz, Eval eval, Gradient grad) {
    Matrix candidate = projectPsd(lsCandidate);
    double value = eval(candidate);
    if (value <= current_) {
      x = std::move(candidate);
      current_ = value;
      return;
    }
    if (!(lipschitz > 0.0)) return;
    const Matrix g = hermitianPart(grad(x));
    double step = config_.stepRule == StepRule::Fixed ? 1.0 / lipschitz : 8.0 / lipschitz;
    const double minStep = config_.stepRule == StepRule::Fixed ? step : 1.0 / (16.0 * lipschitz);
    while (step >= minStep) {
      candidate = projectPsd(x - step * g);
      value = eval(candidate);
      if (value <= current_) {
        x = std::move(candidate);
        current_ = value;
        return;
      }
      step /= 2.0;
    }
  }

  void updateLeft(std::size_t j) {
    const Matrix rest = others(j);
    const Matrix r = t_ - rest;
    const Matrix& b = factors_[j].b;
    auto eval = [&](const Matrix& a) { return (rest + a * b - t_).squaredNorm(); };
    auto grad = [&](const Matrix& a) { Matrix g = 2.0 * (a * b - r) * b.adjoint(); return g; };
    const double bn = opNorm(b);
    improve(factors_[j].a, solveLeft(r, b), 2.0 * bn * bn, eval, grad);
  }

  void updateRight(std::size_t j) {
    const Matrix rest = others(j);
    const Matrix r = t_ - rest;
    const Matrix& a = factors_[j].a;
    auto eval = [&](const Matrix& b) { return (rest + a * b - t_).squaredNorm(); };
    auto grad = [&](const Matrix& b) { Matrix g = 2.0 * a.adjoint() * (a * b - r); return g; };
    const double an = opNorm(a);
    improve(factors_[j].b, solveRight(a, r), 2.0 * an * an, eval, grad);
  }

  const Matrix& t_;
  const OptimizationConfig& config_;
  Rng rng_;
  Eigen::Index n_;
  std::vector<PositiveProduct> factors_;
  double current_ = 0.0;
};

}  // namespace

OptimizationTrace optimizeSumOfProducts(const Matrix& t, const OptimizationConfig& config) {
  requireSquare(t, "optimizeSumOfProducts");
  requireFinite(t, "optimizeSumOfProducts");
  if (config.m <= 0 || config.maxIterations < 0 || config.restarts <= 0) {
    throw std::invalid_argument("optimizeSumOfProducts: counts must be positive");
  }
  const auto restarts = static_cast<std::size_t>(config.restarts);
  std::vector<RestartResult> results(restarts);

  // The returned restart is the first one reaching the target, else the best;
  // the serial loop may stop early without changing that choice.
  if (config.execution == Execution::Serial) {
    for (std::size_t r = 0; r < restarts; ++r) {
      results[r] = Restart(t, config, streamRng(config.seed, r)).run();
      if (results[r].residual <= config.targetResidual) break;
    }
  } else {
#pragma omp parallel for schedule(dynamic, 1)
    for (long r = 0; r < static_cast<long>(restarts); ++r) {
      const auto idx = static_cast<std::size_t>(r);
      results[idx] = Restart(t, config, streamRng(config.seed, idx)).run();
    }
  }

  std::size_t chosen = restarts;
  for (std::size_t r = 0; r < restarts; ++r) {
    if (results[r].residual <= config.targetResidual) {
      chosen = r;
      break;
    }
  }
  if (chosen == restarts) {
    chosen = 0;
    for (std::size_t r = 1; r < restarts; ++r) {
      if (results[r].residual < results[chosen].residual) chosen = r;
    }
  }

  OptimizationTrace trace;
  trace.residualHistory = std::move(results[chosen].history);
  trace.finalFactors = std::move(results[chosen].factors);
  trace.bestResidual = results[chosen].residual;
  trace.bestRestart = static_cast<int>(chosen);
  if (auto lambda = scalarValue(t)) trace.boundFloor = residualLowerBound(*lambda);
  return trace;
}

std::vector<ExperimentRecord> conditionStudy(const std::vector<int>& sizes,
                                             const std::vector<double>& traceMargins, int trials,
                                             std::uint64_t seed, Execution execution) {
  for (double margin : traceMargins) {
    if (!(margin > 0.0)) throw std::invalid_argument("conditionStudy: margins must be positive");
  }
  for (int n : sizes) {
    if (n <= 0) throw std::invalid_argument("conditionStudy: sizes must be positive");
  }
  if (trials <= 0) throw std::invalid_argument("conditionStudy: trials must be positive");

  const std::size_t cells = sizes.size() * traceMargins.size() * static_cast<std::size_t>(trials);
  std::vector<ExperimentRecord> records(cells);
  auto runCell = [&](std::size_t index) {
    const std::size_t trial = index % static_cast<std::size_t>(trials);
    const std::size_t mi = (index / static_cast<std::size_t>(trials)) % traceMargins.size();
    const std::size_t si = index / (static_cast<std::size_t>(trials) * traceMargins.size());
    const int n = sizes[si];
    const double margin = traceMargins[mi];
    Rng rng = streamRng(seed, index);
    Matrix t = randomGaussian(rng, n, n) / std::sqrt(2.0);
    t.diagonal().array() -= t.trace() / static_cast<double>(n);
    t.diagonal().array() += margin;

    ExperimentRecord rec;
    rec.n = n;
    rec.traceMargin = margin;
    rec.trial = static_cast<int>(trial);
    rec.maxCondS = std::numeric_limits<double>::infinity();
    rec.residual = std::numeric_limits<double>::infinity();
    try {
      // The absolute default separation would end every small-margin cell at
      // the tuning step; scale it so the study measures conditioning instead.
      FourSummandParams params;
      params.sepMargin = 1e-3 * std::min(1.0, margin);
      const auto outcome = fourSummand(t, params);
      if (const auto* result = std::get_if<DecompositionResult>(&outcome)) {
        rec.maxCondS = 1.0;
        for (const auto& s : result->summands) rec.maxCondS = std::max(rec.maxCondS, s.conditionNumber);
        rec.residual = result->reconstructionResidual;
        rec.success = rec.residual <= 1e-6 &&
                      std::all_of(result->certificates.begin(), result->certificates.end(),
                                  [](const auto& c) { return c.certified(); });
      }
    } catch (const NumericError&) {
      rec.success = false;
    }
    records[index] = rec;
  };

  if (execution == Execution::Serial) {
    for (std::size_t i = 0; i < cells; ++i) runCell(i);
  } else {
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < static_cast<long>(cells); ++i) runCell(static_cast<std::size_t>(i));
  }
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    return std::tie(a.n, a.traceMargin, a.trial) < std::tie(b.n, b.traceMargin, b.trial);
  });
  return records;
}

std::string formatDouble(double value) {
  std::ostringstream out;
  out.precision(17);
  out << value;
  return out.str();
}

std::string studyCsv(const std::vector<ExperimentRecord>& records) {
  std::string out = "n,trace_margin,trial,max_cond_S,residual,success\n";
  for (const auto& r : records) {
    out += std::to_string(r.n) + ',' + formatDouble(r.traceMargin) + ',' + std::to_string(r.trial) +
           ',' + formatDouble(r.maxCondS) + ',' + formatDouble(r.residual) + ',' +
           (r.success ? "1" : "0") + '\n';
  }
  return out;
}

std::string traceCsv(const OptimizationTrace& trace) {
  std::string out = "iteration,residual\n";
  for (std::size_t i = 0; i < trace.residualHistory.size(); ++i) {
    out += std::to_string(i) + ',' + formatDouble(trace.residualHistory[i]) + '\n';
  }
  return out;
}

}  // namespace posprod
