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

#ifndef CCDQM_DIAGNOSTICS_HPP_
#define CCDQM_DIAGNOSTICS_HPP_

#include <cstddef>
#include <vector>

#include "ccdqm/run.hpp"

namespace ccdqm {

struct ErrorRecursionReport {
  /// slack[k] = sqrt(delta) E|e_k|^2 + delta / (1 - sqrt(delta)) E|x_{k+1} - x_k|^2
  ///            + n mu^2 - E|e_{k+1}|^2, with mu the threshold of step k -> k+1.
  std::vector<double> slack;
  double minSlack = 0.0;
  std::size_t argmin = 0;
};

/// Checks the per-step bound on the estimation error e_k = y_k - x_k.
/// Expectations are replica means (one replica suffices for deterministic
/// compressors); all replicas must share the initial point and length is
/// truncated to the shortest. Throws InvalidInput if delta = 0 but an
/// uncensored step left a nonzero error (compressor declared exact but lossy).
ErrorRecursionReport error_recursion_check(const std::vector<RunRecord>& replicas, double delta,
                                           std::size_t agents);

}  // namespace ccdqm

#endif  // CCDQM_DIAGNOSTICS_HPP_
