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

#ifndef CCDQM_CONFIG_HPP_
#define CCDQM_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccdqm/compressor.hpp"
#include "ccdqm/simulator.hpp"

namespace ccdqm {

/// Raised for unknown keys, unparsable values and out-of-range settings.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Experiment description. Text form is flat "section.key = value" lines
/// with '#' comments; every key has a default.
struct ExperimentConfig {
  // graph
  std::string graphSource = "generate";  // generate | file
  std::size_t graphN = 20;
  double graphTau = 0.4;
  std::uint64_t graphSeed = 1;
  std::string graphPath;

  // data
  std::string dataSource = "synthetic";  // synthetic | csv
  std::size_t dataM = 10;
  std::size_t dataD = 24;
  std::uint64_t dataSeed = 2;
  double dataFlip = 0.1;
  std::string dataPath;

  // objective
  std::string objectiveKind = "logistic";  // logistic | quadratic
  double lambdaReg = 0.01;
  double eigMin = 1.0;
  double eigMax = 4.0;

  // algorithm
  double c = 1.0;
  std::string schedule = "geometric";  // zero | geometric
  double alpha = 1.0;
  double rho = 0.9;
  std::string compressor = "det_quant";
  int bits = 2;
  std::size_t topK = 1;
  std::optional<double> beta;     // "auto" when empty
  std::optional<double> delta;    // "auto": the compressor's analytic bound
  std::optional<double> rWeight;  // "auto": lower end of the admissible bracket
  std::string bitAccounting = "per_link";  // per_link | per_broadcast
  bool hessianCache = true;

  // run
  std::size_t maxIter = 2000;
  double tol = 1e-12;
  std::uint64_t runSeed = 3;
  std::size_t replicas = 1;
  std::size_t threads = 1;
  bool lyapunov = true;

  // output
  std::string outDir = "out";
  std::string outPrefix = "run";

  /// Applies one "key = value" assignment. Throws ConfigError.
  void set(const std::string& key, const std::string& value);
  /// Canonical string of one key's current value.
  std::string get(const std::string& key) const;
  static const std::vector<std::string>& keys();

  /// Range checks and path existence. Throws ConfigError.
  void validate() const;

  Compressor make_compressor() const;
  ThresholdSchedule make_schedule() const;
  RunConfig make_run_config() const;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

/// Every key in canonical order, one "key = value" per line.
std::string serialize_config(const ExperimentConfig& cfg);

}  // namespace ccdqm

#endif  // CCDQM_CONFIG_HPP_
