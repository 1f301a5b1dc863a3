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

#include "posprod/cli.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <regex>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "posprod/decomp.hpp"
#include "posprod/lab.hpp"
#include "posprod/luders.hpp"
#include "posprod/matrix_json.hpp"

namespace posprod::cli {

using nlohmann::json;

namespace {

double parseDouble(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(value)) {
    throw UsageError(what + ": expected a finite number, got '" + text + "'");
  }
  return value;
}

long long parseInteger(const std::string& text, const std::string& what) {
  long long value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw UsageError(what + ": expected an integer, got '" + text + "'");
  }
  return value;
}

std::vector<std::string> splitCommas(const std::string& text) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) parts.push_back(item);
  if (!text.empty() && text.back() == ',') parts.emplace_back();
  return parts;
}

/// Reads params with typed accessors and remembers which keys were used.
class Params {
 public:
  Params(const std::map<std::string, std::string>& raw, std::set<std::string> allowed,
         const std::string& command)
      : raw_(raw) {
    for (const auto& [key, value] : raw) {
      if (!allowed.count(key)) {
        throw UsageError(command + ": unknown parameter '" + key + "'");
      }
    }
  }

  std::optional<std::string> text(const std::string& key) const {
    auto it = raw_.find(key);
    if (it == raw_.end()) return std::nullopt;
    return it->second;
  }
  double real(const std::string& key, double fallback) const {
    auto v = text(key);
    return v ? parseDouble(*v, "parameter " + key) : fallback;
  }
  long long integer(const std::string& key, long long fallback) const {
    auto v = text(key);
    return v ? parseInteger(*v, "parameter " + key) : fallback;
  }
  bool flag(const std::string& key, bool fallback) const {
    auto v = text(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1") return true;
    if (*v == "false" || *v == "0") return false;
    throw UsageError("parameter " + key + ": expected true or false");
  }

 private:
  const std::map<std::string, std::string>& raw_;
};

int positive(long long v, const std::string& what) {
  if (v <= 0 || v > 1'000'000) throw UsageError(what + ": must be a positive integer");
  return static_cast<int>(v);
}

void requireOutput(const RunConfig& config) {
  if (config.outputPath.empty()) throw UsageError(config.command + ": --output is required");
}

void requireInput(const RunConfig& config) {
  if (config.inputPath.empty()) throw UsageError(config.command + ": --input is required");
}

void writeText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw FormatError("failed writing '" + path + "'");
}

/// A bare matrix object or {"matrix": {...}}.
Matrix readMatrix(const std::string& path) {
  const json doc = readJsonFile(path);
  if (doc.is_object() && doc.contains("matrix")) return matrixFromJson(doc["matrix"], "matrix");
  return matrixFromJson(doc, "matrix");
}

/// {"pairs": [{"A": matrix, "B": matrix}, ...]}
std::vector<CoefficientPair> readPairs(const std::string& path) {
  const json doc = readJsonFile(path);
  if (!doc.is_object() || !doc.contains("pairs")) throw FormatError("field 'pairs': missing");
  const json& list = doc["pairs"];
  if (!list.is_array() || list.empty()) {
    throw FormatError("field 'pairs': expected a nonempty array");
  }
  std::vector<CoefficientPair> pairs;
  for (std::size_t j = 0; j < list.size(); ++j) {
    const std::string where = "pairs[" + std::to_string(j) + "]";
    const json& item = list[j];
    if (!item.is_object()) throw FormatError("field '" + where + "': expected an object");
    for (const char* key : {"A", "B"}) {
      if (!item.contains(key)) throw FormatError("field '" + where + "." + key + "': missing");
    }
    pairs.emplace_back(matrixFromJson(item["A"], where + ".A"),
                       matrixFromJson(item["B"], where + ".B"));
  }
  return pairs;
}

json productsJson(const std::vector<PositiveProduct>& products) {
  json out = json::array();
  for (const auto& p : products) out.push_back({{"A", toJson(p.a)}, {"B", toJson(p.b)}});
  return out;
}

json eigenvaluesJson(const std::vector<Complex>& values) {
  json out = json::array();
  for (const auto& z : values) out.push_back(toJson(z));
  return out;
}

}  // namespace

Complex parseComplex(const std::string& raw) {
  std::string text;
  for (char c : raw) {
    if (!std::isspace(static_cast<unsigned char>(c))) text += c;
  }
  if (text.empty()) throw UsageError("lambda: empty value");
  if (text.find(',') != std::string::npos) {
    const auto parts = splitCommas(text);
    if (parts.size() != 2) throw UsageError("lambda: expected 're,im'");
    return {parseDouble(parts[0], "lambda re"), parseDouble(parts[1], "lambda im")};
  }
  if (text.back() != 'i' && text.back() != 'j') return {parseDouble(text, "lambda"), 0.0};
  // a+bi form: split at the last sign that is not part of an exponent.
  const std::string body = text.substr(0, text.size() - 1);
  std::size_t split = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto imagPart = [](const std::string& s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    return parseDouble(s, "lambda im");
  };
  if (split == std::string::npos) return {0.0, imagPart(body)};
  return {parseDouble(body.substr(0, split), "lambda re"), imagPart(body.substr(split))};
}

kernels::Grid parseGrid(const std::string& text) {
  const auto parts = splitCommas(text);
  if (parts.size() != 5) throw UsageError("grid: expected re0,re1,im0,im1,steps");
  kernels::Grid grid;
  grid.re0 = parseDouble(parts[0], "grid re0");
  grid.re1 = parseDouble(parts[1], "grid re1");
  grid.im0 = parseDouble(parts[2], "grid im0");
  grid.im1 = parseDouble(parts[3], "grid im1");
  grid.steps = positive(parseInteger(parts[4], "grid steps"), "grid steps");
  return grid;
}

ExitCode runDecompose(const RunConfig& config) {
  const Params params(config.params,
                      {"delta", "beta", "a1", "restarts", "iterations", "search", "sep_margin"},
                      "decompose");
  requireInput(config);
  requireOutput(config);
  const int summands = config.summands.value_or(4);
  if (summands < 2 || summands > 4) throw UsageError("decompose: --summands must be 2, 3 or 4");
  for (const char* key : {"delta", "beta", "a1"}) {
    if (summands != 4 && params.text(key)) {
      throw UsageError(std::string("decompose: parameter ") + key + " needs --summands 4");
    }
  }
  for (const char* key : {"restarts", "iterations", "search"}) {
    if (summands == 4 && params.text(key)) {
      throw UsageError(std::string("decompose: parameter ") + key + " needs --summands 2 or 3");
    }
  }
  const Matrix t = readMatrix(config.inputPath);

  DecompositionOutcome outcome;
  if (summands == 4) {
    FourSummandParams fp;
    if (auto d = params.text("delta")) fp.delta = parseDouble(*d, "parameter delta");
    if (auto b = params.text("beta")) fp.beta = parseDouble(*b, "parameter beta");
    const std::string form = params.text("a1").value_or("scalar");
    if (form == "two-point") {
      fp.a1Form = A1Form::TwoPoint;
    } else if (form != "scalar") {
      throw UsageError("parameter a1: expected scalar or two-point");
    }
    fp.sepMargin = params.real("sep_margin", fp.sepMargin);
    outcome = fourSummand(t, fp);
  } else {
    SearchConfig sc;
    sc.seed = config.seed;
    sc.restarts = positive(params.integer("restarts", sc.restarts), "parameter restarts");
    sc.maxIterations = positive(params.integer("iterations", sc.maxIterations),
                                "parameter iterations");
    sc.allowSearch = params.flag("search", sc.allowSearch);
    sc.sepMargin = params.real("sep_margin", sc.sepMargin);
    outcome = summands == 3 ? threeSummand(t, sc) : twoSummand(t, sc);
  }

  if (const auto* cert = std::get_if<ObstructionCertificate>(&outcome)) {
    json out = toJson(*cert);
    out["status"] = "obstruction";
    out["summandCount"] = summands;
    writeJsonFile(config.outputPath, out);
    return ExitCode::Obstruction;
  }
  const auto& result = std::get<DecompositionResult>(outcome);
  VerifyOptions vo;
  if (config.tolerance) vo.tol = *config.tolerance;
  const VerificationReport report = verifyDecomposition(t, result, vo);
  json out = toJson(result);
  out["status"] = "decomposed";
  out["summandCount"] = summands;
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back(
        {{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"threshold", c.threshold}});
  }
  out["verification"] = {{"passed", report.passed()}, {"checks", checks}};
  writeJsonFile(config.outputPath, out);
  return ExitCode::Success;
}

ExitCode runSpectrum(const RunConfig& config) {
  const Params params(config.params, {}, "spectrum");
  requireInput(config);
  requireOutput(config);
  const double tol = config.tolerance.value_or(kDefaultTol);
  const ElementaryOperator op = buildElementary(readPairs(config.inputPath));
  const SpectrumReport report = spectrum(op, tol);
  json out;
  out["dimension"] = op.dimension();
  out["length"] = op.length();
  out["isLuders"] = op.isLuders;
  out["eigenvalues"] = eigenvaluesJson(report.eigenvalues);
  out["maxDistToRPlus"] = report.maxDistToRPlus;
  out["containedInRPlus"] = report.isRealNonnegative;
  out["tolerance"] = report.tolerance;
  writeJsonFile(config.outputPath, out);
  return ExitCode::Success;
}

ExitCode runLudersDemo(const RunConfig& config) {
  const Params params(config.params, {"k"}, "luders-demo");
  requireOutput(config);
  if (!config.lambda) throw UsageError("luders-demo: --lambda is required");
  const Complex lambda = *config.lambda;

  // Rejection comes first: no input can rescue lambda outside [0, inf).
  const double bound = residualLowerBound(lambda);
  if (bound > 0.0) {
    json out;
    out["status"] = "rejected";
    out["lambda"] = toJson(lambda);
    out["bound"] = bound;
    out["explanation"] = EigenvalueRejected(lambda, bound).what();
    writeJsonFile(config.outputPath, out);
    throw EigenvalueRejected(lambda, bound);
  }

  std::vector<PositiveProduct> products;
  if (!config.inputPath.empty()) {
    for (auto& [a, b] : readPairs(config.inputPath)) products.push_back({a, b});
  } else {
    const int k = positive(params.integer("k", 1), "parameter k");
    const int m = positive(config.m.value_or(1), "--m");
    if (m == 1) {
      products.push_back({lambda.real() * Matrix::Identity(k, k), Matrix::Identity(k, k)});
    } else {
      SearchConfig sc;
      sc.seed = config.seed;
      auto outcome = sumOfProducts(lambda * Matrix::Identity(k, k), m, sc);
      if (auto* cert = std::get_if<ObstructionCertificate>(&outcome)) {
        throw NumericError("luders-demo: " + cert->explanation);
      }
      products = std::get<std::vector<PositiveProduct>>(outcome);
    }
  }

  const LudersDemo demo = eigenvalueDemo(lambda, products);
  json out;
  out["status"] = "eigenvalue";
  out["lambda"] = toJson(demo.lambda);
  out["products"] = productsJson(products);
  json blocks = json::array();
  for (const auto& t : demo.blockCoefficients) blocks.push_back(toJson(t));
  out["blockCoefficients"] = blocks;
  out["eigenvector"] = toJson(demo.eigenvector);
  out["eigenResidual"] = demo.eigenResidual;
  out["isLuders"] = demo.op.isLuders;
  writeJsonFile(config.outputPath, out);
  return ExitCode::Success;
}

ExitCode runOptimize(const RunConfig& config) {
  const Params params(config.params, {"n", "restarts", "iterations", "step", "target", "trace"},
                      "optimize");
  requireOutput(config);
  Matrix t;
  if (!config.inputPath.empty()) {
    if (config.lambda) throw UsageError("optimize: give either --input or --lambda");
    t = readMatrix(config.inputPath);
  } else if (config.lambda) {
    const int n = positive(params.integer("n", 2), "parameter n");
    t = *config.lambda * Matrix::Identity(n, n);
  } else {
    throw UsageError("optimize: --input or --lambda is required");
  }
  requireSquare(t, "optimize");

  OptimizationConfig oc;
  oc.m = positive(config.m.value_or(oc.m), "--m");
  oc.seed = config.seed;
  oc.restarts = positive(params.integer("restarts", oc.restarts), "parameter restarts");
  oc.maxIterations = positive(params.integer("iterations", oc.maxIterations),
                              "parameter iterations");
  oc.targetResidual = params.real("target", oc.targetResidual);
  const std::string step = params.text("step").value_or("backtracking");
  if (step == "fixed") {
    oc.stepRule = StepRule::Fixed;
  } else if (step != "backtracking") {
    throw UsageError("parameter step: expected fixed or backtracking");
  }

  const OptimizationTrace trace = optimizeSumOfProducts(t, oc);
  json out;
  out["m"] = oc.m;
  out["seed"] = oc.seed;
  out["bestResidual"] = trace.bestResidual;
  out["bestRestart"] = trace.bestRestart;
  out["iterations"] = trace.residualHistory.size() - 1;
  out["boundFloor"] = trace.boundFloor ? json(*trace.boundFloor) : json(nullptr);
  out["factors"] = productsJson(trace.finalFactors);
  writeJsonFile(config.outputPath, out);
  if (auto path = params.text("trace")) writeText(*path, traceCsv(trace));
  return ExitCode::Success;
}

ExitCode runStudy(const RunConfig& config) {
  const Params params(config.params, {"sizes", "margins", "trials"}, "study");
  requireOutput(config);
  std::vector<int> sizes;
  for (const auto& s : splitCommas(params.text("sizes").value_or("4"))) {
    sizes.push_back(positive(parseInteger(s, "parameter sizes"), "parameter sizes"));
  }
  std::vector<double> margins;
  for (const auto& s : splitCommas(params.text("margins").value_or("1,0.1,0.01"))) {
    const double v = parseDouble(s, "parameter margins");
    if (v <= 0.0) throw UsageError("parameter margins: values must be positive");
    margins.push_back(v);
  }
  const int trials = positive(params.integer("trials", 20), "parameter trials");
  writeText(config.outputPath, studyCsv(conditionStudy(sizes, margins, trials, config.seed)));
  return ExitCode::Success;
}

ExitCode runPseudospectrum(const RunConfig& config) {
  const Params params(config.params, {}, "pseudospectrum");
  requireInput(config);
  requireOutput(config);
  if (!config.grid) throw UsageError("pseudospectrum: --grid is required");
  const ElementaryOperator op = buildElementary(readPairs(config.inputPath));
  writeText(config.outputPath, pseudospectrumCsv(pseudospectrum(op, *config.grid)));
  return ExitCode::Success;
}

int run(const RunConfig& config, std::ostream& err) {
  static const std::map<std::string, ExitCode (*)(const RunConfig&)> commands{
      {"decompose", runDecompose},   {"spectrum", runSpectrum},
      {"luders-demo", runLudersDemo}, {"optimize", runOptimize},
      {"study", runStudy},           {"pseudospectrum", runPseudospectrum}};
  auto it = commands.find(config.command);
  if (it == commands.end()) {
    err << "unknown command '" << config.command << "'\n";
    return static_cast<int>(ExitCode::InputError);
  }
  try {
    const ExitCode code = it->second(config);
    if (code == ExitCode::Obstruction) {
      err << config.command << ": obstruction certificate written to " << config.outputPath
          << '\n';
    }
    return static_cast<int>(code);
  } catch (const EigenvalueRejected& e) {
    err << config.command << ": " << e.what() << '\n';
    return static_cast<int>(ExitCode::Obstruction);
  } catch (const std::exception& e) {
    err << config.command << ": " << e.what() << '\n';
    return static_cast<int>(ExitCode::InputError);
  }
}

int main(int argc, char** argv) {
  CLI::App app{"Sums of products of positive matrices and Lueders operator spectra"};
  RunConfig config;
  std::string lambda;
  std::string grid;
  std::vector<std::string> params;
  std::optional<double> tol;
  std::optional<int> summands;
  std::optional<int> m;

  app.add_option("command", config.command, "Command to run")
      ->required()
      ->check(CLI::IsMember(
          {"decompose", "spectrum", "luders-demo", "optimize", "study", "pseudospectrum"}));
  app.add_option("--input", config.inputPath, "Input JSON file");
  app.add_option("--output", config.outputPath, "Output JSON or CSV file");
  app.add_option("--summands", summands, "Summand count for decompose (2, 3 or 4)");
  app.add_option("--lambda", lambda, "Complex scalar: 2, -1, 0.5,1 or -1+1i");
  app.add_option("--m", m, "Number of product pairs");
  app.add_option("--seed", config.seed, "Random seed");
  app.add_option("--tol", tol, "Tolerance override");
  app.add_option("--grid", grid, "re0,re1,im0,im1,steps");
  app.add_option("--param", params, "Command-specific key=value (repeatable)")
      ->allow_extra_args(false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ExitCode::InputError);
  }

  try {
    config.tolerance = tol;
    config.summands = summands;
    config.m = m;
    if (tol && !(*tol > 0.0)) throw UsageError("--tol must be positive");
    if (!lambda.empty()) config.lambda = parseComplex(lambda);
    if (!grid.empty()) config.grid = parseGrid(grid);
    for (const auto& kv : params) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw UsageError("--param: expected key=value, got '" + kv + "'");
      }
      if (!config.params.emplace(kv.substr(0, eq), kv.substr(eq + 1)).second) {
        throw UsageError("--param: duplicate key '" + kv.substr(0, eq) + "'");
      }
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return static_cast<int>(ExitCode::InputError);
  }
  return run(config, std::cerr);
}

}  // namespace posprod::cli
