// Copyright 2026 The ccdqm Authors. All Rights Reserved.
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
// =============================================================================

#include "ccdqm/config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace ccdqm {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  if (used != v.size()) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw ConfigError(key + ": integer out of range '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::optional<double> to_auto_double(const std::string& key, const std::string& v) {
  if (v == "auto") return std::nullopt;
  return to_double(key, v);
}

std::string from_auto(const std::optional<double>& v) { return v ? fmt_double(*v) : "auto"; }

std::string one_of(const std::string& key, const std::string& v,
                   std::initializer_list<const char*> allowed) {
  std::string list;
  for (const char* a : allowed) {
    if (v == a) return v;
    list += list.empty() ? a : std::string("|") + a;
  }
  throw ConfigError(key + ": expected " + list + ", got '" + v + "'");
}

struct Field {
  std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

// Ordered registry; the order is the canonical serialization order.
const std::vector<std::pair<std::string, Field>>& registry() {
  using C = ExperimentConfig;
  using S = const std::string&;
  static const std::vector<std::pair<std::string, Field>> fields = {
      {"graph.source", {[](C& c, S k, S v) { c.graphSource = one_of(k, v, {"generate", "file"}); },
                        [](const C& c) { return c.graphSource; }}},
      {"graph.n", {[](C& c, S k, S v) { c.graphN = to_uint(k, v); },
                   [](const C& c) { return std::to_string(c.graphN); }}},
      {"graph.tau", {[](C& c, S k, S v) { c.graphTau = to_double(k, v); },
                     [](const C& c) { return fmt_double(c.graphTau); }}},
      {"graph.seed", {[](C& c, S k, S v) { c.graphSeed = to_uint(k, v); },
                      [](const C& c) { return std::to_string(c.graphSeed); }}},
      {"graph.path", {[](C& c, S, S v) { c.graphPath = v; },
                      [](const C& c) { return c.graphPath; }}},
      {"data.source", {[](C& c, S k, S v) { c.dataSource = one_of(k, v, {"synthetic", "csv"}); },
                       [](const C& c) { return c.dataSource; }}},
      {"data.m", {[](C& c, S k, S v) { c.dataM = to_uint(k, v); },
                  [](const C& c) { return std::to_string(c.dataM); }}},
      {"data.d", {[](C& c, S k, S v) { c.dataD = to_uint(k, v); },
                  [](const C& c) { return std::to_string(c.dataD); }}},
      {"data.seed", {[](C& c, S k, S v) { c.dataSeed = to_uint(k, v); },
                     [](const C& c) { return std::to_string(c.dataSeed); }}},
      {"data.flip", {[](C& c, S k, S v) { c.dataFlip = to_double(k, v); },
                     [](const C& c) { return fmt_double(c.dataFlip); }}},
      {"data.path", {[](C& c, S, S v) { c.dataPath = v; }, [](const C& c) { return c.dataPath; }}},
      {"objective.kind",
       {[](C& c, S k, S v) { c.objectiveKind = one_of(k, v, {"logistic", "quadratic"}); },
        [](const C& c) { return c.objectiveKind; }}},
      {"objective.lambda_reg", {[](C& c, S k, S v) { c.lambdaReg = to_double(k, v); },
                                [](const C& c) { return fmt_double(c.lambdaReg); }}},
      {"objective.eig_min", {[](C& c, S k, S v) { c.eigMin = to_double(k, v); },
                             [](const C& c) { return fmt_double(c.eigMin); }}},
      {"objective.eig_max", {[](C& c, S k, S v) { c.eigMax = to_double(k, v); },
                             [](const C& c) { return fmt_double(c.eigMax); }}},
      {"algorithm.c", {[](C& c, S k, S v) { c.c = to_double(k, v); },
                       [](const C& c) { return fmt_double(c.c); }}},
      {"algorithm.schedule",
       {[](C& c, S k, S v) { c.schedule = one_of(k, v, {"zero", "geometric"}); },
        [](const C& c) { return c.schedule; }}},
      {"algorithm.alpha", {[](C& c, S k, S v) { c.alpha = to_double(k, v); },
                           [](const C& c) { return fmt_double(c.alpha); }}},
      {"algorithm.rho", {[](C& c, S k, S v) { c.rho = to_double(k, v); },
                         [](const C& c) { return fmt_double(c.rho); }}},
      {"algorithm.compressor",
       {[](C& c, S k, S v) {
          c.compressor = one_of(k, v, {"identity", "det_quant", "stoch_quant", "top_k"});
        },
        [](const C& c) { return c.compressor; }}},
      {"algorithm.bits", {[](C& c, S k, S v) { c.bits = static_cast<int>(to_uint(k, v)); },
                          [](const C& c) { return std::to_string(c.bits); }}},
      {"algorithm.top_k", {[](C& c, S k, S v) { c.topK = to_uint(k, v); },
                           [](const C& c) { return std::to_string(c.topK); }}},
      {"algorithm.beta", {[](C& c, S k, S v) { c.beta = to_auto_double(k, v); },
                          [](const C& c) { return from_auto(c.beta); }}},
      {"algorithm.delta", {[](C& c, S k, S v) { c.delta = to_auto_double(k, v); },
                           [](const C& c) { return from_auto(c.delta); }}},
      {"algorithm.r_weight", {[](C& c, S k, S v) { c.rWeight = to_auto_double(k, v); },
                              [](const C& c) { return from_auto(c.rWeight); }}},
      {"algorithm.bit_accounting",
       {[](C& c, S k, S v) { c.bitAccounting = one_of(k, v, {"per_link", "per_broadcast"}); },
        [](const C& c) { return c.bitAccounting; }}},
      {"algorithm.hessian_cache", {[](C& c, S k, S v) { c.hessianCache = to_bool(k, v); },
                                   [](const C& c) { return std::string(c.hessianCache ? "true" : "false"); }}},
      {"run.max_iter", {[](C& c, S k, S v) { c.maxIter = to_uint(k, v); },
                        [](const C& c) { return std::to_string(c.maxIter); }}},
      {"run.tol", {[](C& c, S k, S v) { c.tol = to_double(k, v); },
                   [](const C& c) { return fmt_double(c.tol); }}},
      {"run.seed", {[](C& c, S k, S v) { c.runSeed = to_uint(k, v); },
                    [](const C& c) { return std::to_string(c.runSeed); }}},
      {"run.replicas", {[](C& c, S k, S v) { c.replicas = to_uint(k, v); },
                        [](const C& c) { return std::to_string(c.replicas); }}},
      {"run.threads", {[](C& c, S k, S v) { c.threads = to_uint(k, v); },
                       [](const C& c) { return std::to_string(c.threads); }}},
      {"run.lyapunov", {[](C& c, S k, S v) { c.lyapunov = to_bool(k, v); },
                        [](const C& c) { return std::string(c.lyapunov ? "true" : "false"); }}},
      {"output.dir", {[](C& c, S, S v) { c.outDir = v; }, [](const C& c) { return c.outDir; }}},
      {"output.prefix", {[](C& c, S, S v) { c.outPrefix = v; },
                         [](const C& c) { return c.outPrefix; }}},
  };
  return fields;
}

const Field& field(const std::string& key) {
  static const auto index = [] {
    std::map<std::string, const Field*> m;
    for (const auto& [k, f] : registry()) m.emplace(k, &f);
    return m;
  }();
  auto it = index.find(key);
  if (it == index.end()) throw ConfigError("unknown config key '" + key + "'");
  return *it->second;
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  field(key).set(*this, key, trim(value));
}

std::string ExperimentConfig::get(const std::string& key) const { return field(key).get(*this); }

const std::vector<std::string>& ExperimentConfig::keys() {
  static const auto ks = [] {
    std::vector<std::string> v;
    for (const auto& [k, f] : registry()) v.push_back(k);
    return v;
  }();
  return ks;
}

void ExperimentConfig::validate() const {
  if (graphSource == "generate") {
    if (graphN < 2) throw ConfigError("graph.n: need at least 2 agents");
    if (!(graphTau > 0.0 && graphTau <= 1.0)) throw ConfigError("graph.tau: must lie in (0, 1]");
  } else if (graphPath.empty() || !std::filesystem::exists(graphPath)) {
    throw ConfigError("graph.path: file '" + graphPath + "' does not exist");
  }
  if (dataSource == "csv") {
    if (objectiveKind != "logistic") throw ConfigError("data.source = csv requires objective.kind = logistic");
    if (dataPath.empty() || !std::filesystem::exists(dataPath))
      throw ConfigError("data.path: file '" + dataPath + "' does not exist");
  } else {
    if (dataM == 0) throw ConfigError("data.m: must be >= 1");
    if (dataD == 0) throw ConfigError("data.d: must be >= 1");
    if (!(dataFlip >= 0.0 && dataFlip <= 1.0)) throw ConfigError("data.flip: must lie in [0, 1]");
  }
  if (!(lambdaReg >= 0.0)) throw ConfigError("objective.lambda_reg: must be >= 0");
  if (objectiveKind == "quadratic" && !(eigMin > 0.0 && eigMax >= eigMin))
    throw ConfigError("objective.eig_min/eig_max: need 0 < eig_min <= eig_max");
  if (!(c > 0.0)) throw ConfigError("algorithm.c: must be > 0");
  if (schedule == "geometric") {
    if (!(alpha > 0.0)) throw ConfigError("algorithm.alpha: must be > 0");
    if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("algorithm.rho: must lie in (0, 1)");
  }
  if ((compressor == "det_quant" || compressor == "stoch_quant") && (bits < 1 || bits > 52))
    throw ConfigError("algorithm.bits: must lie in [1, 52]");
  if (compressor == "top_k" && topK < 1) throw ConfigError("algorithm.top_k: must be >= 1");
  if (beta && !(*beta > 0.0)) throw ConfigError("algorithm.beta: must be > 0 or auto");
  if (delta && !(*delta >= 0.0 && *delta < 1.0))
    throw ConfigError("algorithm.delta: must lie in [0, 1) or be auto");
  if (rWeight && !(*rWeight >= 0.0)) throw ConfigError("algorithm.r_weight: must be >= 0 or auto");
  if (maxIter == 0) throw ConfigError("run.max_iter: must be >= 1");
  if (!(tol >= 0.0)) throw ConfigError("run.tol: must be >= 0");
  if (replicas == 0) throw ConfigError("run.replicas: must be >= 1");
  if (threads == 0) throw ConfigError("run.threads: must be >= 1");
  if (outPrefix.empty()) throw ConfigError("output.prefix: must not be empty");
}

Compressor ExperimentConfig::make_compressor() const {
  switch (parse_compressor_kind(compressor)) {
    case Compressor::Kind::Identity:
      return Compressor::identity();
    case Compressor::Kind::DetQuant:
      return Compressor::det_quant(bits);
    case Compressor::Kind::StochQuant:
      return Compressor::stoch_quant(bits);
    case Compressor::Kind::TopK:
      return Compressor::top_k(topK);
  }
  return Compressor::identity();
}

ThresholdSchedule ExperimentConfig::make_schedule() const {
  if (schedule == "zero") return ThresholdSchedule::zero();
  return ThresholdSchedule::geometric(alpha, rho);
}

RunConfig ExperimentConfig::make_run_config() const {
  RunConfig rc;
  rc.c = c;
  rc.schedule = make_schedule();
  rc.compressor = make_compressor();
  rc.maxIter = maxIter;
  rc.tol = tol;
  rc.seed = runSeed;
  rc.accounting = bitAccounting == "per_broadcast" ? BitAccounting::PerBroadcast
                                                   : BitAccounting::PerLink;
  rc.hessianCache = hessianCache;
  rc.threads = threads;
  return rc;
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    try {
      cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& [key, f] : registry()) out += key + " = " + f.get(cfg) + "\n";
  return out;
}

}  // namespace ccdqm
