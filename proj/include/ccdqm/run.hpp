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

#ifndef CCDQM_RUN_HPP_
#define CCDQM_RUN_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ccdqm/common.hpp"
#include "ccdqm/lyapunov.hpp"
#include "ccdqm/simulator.hpp"

namespace ccdqm {

/// One row per iteration; row k describes the state after k iterations.
/// Fields that do not apply (no x*, no Lyapunov tracker, row 0) hold NaN.
struct IterationMetrics {
  std::size_t iter = 0;
  double err = 0.0;
  double consensusError = 0.0;
  double dualResidual = 0.0;
  std::uint64_t bitsCum = 0;           // per the configured accounting
  std::uint64_t bitsPerLinkCum = 0;
  std::uint64_t bitsPerBroadcastCum = 0;
  std::uint64_t roundsCum = 0;         // agent transmissions
  std::size_t triggers = 0;
  std::size_t hessRefreshes = 0;
  double vTotal = 0.0;
  double vPrimal = 0.0;
  double vDual = 0.0;
  double vError = 0.0;
  double phiMismatch = 0.0;
  double dualSum = 0.0;      // |sum_i phi_i|
  double errorNormSq = 0.0;  // |y_k - x_k|^2
  double stepNormSq = 0.0;   // |x_k - x_{k-1}|^2
  double threshold = 0.0;    // trigger threshold used for the step into k
};

struct RunRecord {
  std::string variant;
  std::vector<IterationMetrics> rows;
  bool reachedTol = false;

  const IterationMetrics& last() const { return rows.back(); }
  /// First row with err <= tol, if any.
  std::optional<std::size_t> first_below(double tol) const;
  std::vector<double> err_series() const;
};

struct RunOptions {
  std::optional<Vector> xStar;           // enables err and tol stopping
  LyapunovTracker* lyapunov = nullptr;   // optional, advanced every iteration
  std::function<void(const IterationMetrics&)> onRow;  // single consumer
};

/// Runs until config.maxIter iterations or err <= config.tol. Row 0 is the
/// initial state.
RunRecord run(Simulator& sim, const RunOptions& options);

inline constexpr const char* kMetricsHeader =
    "iter,err,consensus_err,dual_residual,bits_cum,rounds_cum,triggers,hess_refresh,"
    "V_total,V_primal,V_dual,V_error";

/// Metrics CSV with floats at 17 significant digits.
void write_metrics_csv(std::ostream& out, const RunRecord& record);
void write_metrics_csv_file(const std::string& path, const RunRecord& record);

/// Parses a metrics CSV back (columns of kMetricsHeader only).
RunRecord read_metrics_csv(std::istream& in);

/// Column-wise arithmetic mean over replicas, truncated to the shortest run.
/// Integer columns are rounded to the nearest integer.
RunRecord mean_record(const std::vector<RunRecord>& replicas);

}  // namespace ccdqm

#endif  // CCDQM_RUN_HPP_
