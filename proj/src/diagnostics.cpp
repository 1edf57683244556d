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

#include "ccdqm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ccdqm {

ErrorRecursionReport error_recursion_check(const std::vector<RunRecord>& replicas, double delta,
                                           std::size_t agents) {
  if (replicas.empty()) throw InvalidInput("error_recursion_check: no trajectories");
  if (!(delta >= 0.0 && delta < 1.0))
    throw InvalidInput("error_recursion_check: delta must lie in [0, 1)");
  std::size_t len = replicas.front().rows.size();
  for (const auto& r : replicas) len = std::min(len, r.rows.size());
  if (len < 2) throw InvalidInput("error_recursion_check: need at least one step");

  const double count = static_cast<double>(replicas.size());
  auto mean = [&](std::size_t k, double IterationMetrics::*field) {
    double s = 0.0;
    for (const auto& r : replicas) s += r.rows[k].*field;
    return s / count;
  };

  const double root = std::sqrt(delta);
  ErrorRecursionReport rep;
  rep.minSlack = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < len; ++k) {
    const double e_now = mean(k, &IterationMetrics::errorNormSq);
    const double e_next = mean(k + 1, &IterationMetrics::errorNormSq);
    const double step = mean(k + 1, &IterationMetrics::stepNormSq);
    const double mu = replicas.front().rows[k + 1].threshold;
    if (delta == 0.0 && mu == 0.0 && e_next > 0.0)
      throw InvalidInput("error_recursion_check: delta = 0 but step " + std::to_string(k) +
                         " left compression error " + std::to_string(e_next) +
                         "; the compressor is mis-declared");
    const double slack = root * e_now + delta / (1.0 - root) * step +
                         static_cast<double>(agents) * mu * mu - e_next;
    rep.slack.push_back(slack);
    if (slack < rep.minSlack) {
      rep.minSlack = slack;
      rep.argmin = k;
    }
  }
  return rep;
}

}  // namespace ccdqm
