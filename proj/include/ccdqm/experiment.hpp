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

#ifndef CCDQM_EXPERIMENT_HPP_
#define CCDQM_EXPERIMENT_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccdqm/centralized.hpp"
#include "ccdqm/config.hpp"
#include "ccdqm/feasibility.hpp"
#include "ccdqm/graph.hpp"
#include "ccdqm/objective.hpp"
#include "ccdqm/run.hpp"

namespace ccdqm {

/// Everything the variants share: graph, local objectives and the optimum.
struct ProblemInstance {
  Graph graph;
  SpectralSummary spectra;
  std::vector<LocalObjective> objectives;
  ProblemConstants constants;
  CentralizedSolution optimum;
};

/// Builds the instance described by the graph, data and objective keys.
/// Errors carry the offending config key.
ProblemInstance build_instance(const ExperimentConfig& cfg);

/// Feasibility pre-check with the config's delta (or the compressor's
/// analytic bound). A missing bound yields a failing report with a note.
FeasibilityReport feasibility_precheck(const ExperimentConfig& cfg, const ProblemInstance& inst);

/// Thrown by strict runs whose pre-check fails, before any iteration.
class FeasibilityFailure : public std::runtime_error {
 public:
  FeasibilityFailure(const std::string& what, FeasibilityReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const FeasibilityReport& report() const { return report_; }

 private:
  FeasibilityReport report_;
};

struct ExperimentOptions {
  bool strict = false;
  bool writeFiles = true;
};

struct ExperimentResult {
  ExperimentConfig resolved;  // auto keys replaced by the values used
  FeasibilityReport feasibility;
  std::vector<RunRecord> replicas;
  RunRecord mean;  // equals replicas[0] for a single replica
  std::vector<std::string> files;
  std::vector<std::string> notes;
};

/// Runs the configured variant. Writes <prefix>.csv and <prefix>.meta; with
/// several replicas <prefix>.csv holds the replica mean and the individual
/// runs go to <prefix>.rep<r>.csv.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const ExperimentOptions& opts = {});
ExperimentResult run_experiment(const ExperimentConfig& cfg, const ProblemInstance& inst,
                                const ExperimentOptions& opts = {});

/// Spellings accepted by compare: dqm, cdqm, qdqm, ccdqm.
ExperimentConfig variant_config(const ExperimentConfig& base, const std::string& variant);

struct VariantSummary {
  std::string variant;
  bool reached = false;
  std::size_t iterations = 0;      // to tol, or total when not reached
  std::uint64_t transmissions = 0; // at that row
  std::uint64_t bits = 0;
  double sigmaHat = 0.0;           // NaN when the series is too short
  double finalErr = 0.0;
  double bestErr = 0.0;
};

VariantSummary summarize(const std::string& variant, const RunRecord& rec, double tol);

inline constexpr const char* kSummaryHeader =
    "variant,reached_tol,iterations,transmissions,bits,sigma_hat,final_err,best_err";

void write_summary_csv(std::ostream& out, const std::vector<VariantSummary>& rows);

/// Runs each variant on one shared instance and writes <prefix>_<variant>.csv
/// plus <prefix>_summary.csv.
std::vector<VariantSummary> compare_variants(const ExperimentConfig& cfg,
                                             const std::vector<std::string>& variants,
                                             const ExperimentOptions& opts = {});

struct SweepPoint {
  std::string value;
  VariantSummary summary;
  bool feasible = false;
};

/// Reruns the configured variant with key set to each value; writes
/// <prefix>_sweep.csv.
std::vector<SweepPoint> sweep(const ExperimentConfig& cfg, const std::string& key,
                              const std::vector<std::string>& values,
                              const ExperimentOptions& opts = {});

}  // namespace ccdqm

#endif  // CCDQM_EXPERIMENT_HPP_
