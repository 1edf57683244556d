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

#ifndef CCDQM_CENTRALIZED_HPP_
#define CCDQM_CENTRALIZED_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "ccdqm/common.hpp"
#include "ccdqm/objective.hpp"

namespace ccdqm {

struct CentralizedSolution {
  Vector x;
  double value = 0.0;
  double gradNorm = 0.0;
  std::size_t iterations = 0;
  bool stronglyConvex = true;
  std::string warning;  // set when the aggregate is not strongly convex
};

/// Damped Newton (Armijo backtracking) on sum_i f_i until |grad| <= tol.
/// Throws NumericalFailure after max_iter iterations.
CentralizedSolution centralized_solve(const std::vector<LocalObjective>& objectives,
                                      double tol = 1e-12, std::size_t max_iter = 200);

}  // namespace ccdqm

#endif  // CCDQM_CENTRALIZED_HPP_
