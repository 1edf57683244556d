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

#include "ccdqm/centralized.hpp"

#include <cmath>

namespace ccdqm {

CentralizedSolution centralized_solve(const std::vector<LocalObjective>& objectives, double tol,
                                      std::size_t max_iter) {
  if (objectives.empty()) throw InvalidInput("centralized_solve: no objectives");
  const auto d = static_cast<Eigen::Index>(objectives.front().dimension());
  CentralizedSolution sol;
  double v_min = 0.0;
  try {
    std::vector<ConvexityConstants> cs;
    for (const auto& o : objectives) cs.push_back(o.convexity_constants());
    v_min = aggregate(cs).v;
  } catch (const InvalidInput&) {
    v_min = 0.0;
  }
  if (!(v_min > 0.0)) {
    sol.stronglyConvex = false;
    sol.warning = "objective not strongly convex; stopping on gradient norm only";
  }

  Vector x = Vector::Zero(d);
  double f = total_value(objectives, x);
  Vector g = total_gradient(objectives, x);
  std::size_t it = 0;
  for (; it < max_iter && g.norm() > tol; ++it) {
    const Matrix h = total_hessian(objectives, x);
    Eigen::LDLT<Matrix> ldlt(h);
    Vector p = ldlt.solve(-g);
    if (ldlt.info() != Eigen::Success || !p.allFinite() || g.dot(p) >= 0.0) p = -g;
    const double slope = g.dot(p);
    double t = 1.0;
    bool accepted = false;
    while (t > 1e-12) {
      const Vector trial = x + t * p;
      const double ft = total_value(objectives, trial);
      if (ft <= f + 1e-4 * t * slope) {
        x = trial;
        f = ft;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // Near the optimum f stops resolving the decrease; fall back to the
      // gradient norm as the progress measure.
      const Vector trial = x + p;
      const Vector gt = total_gradient(objectives, trial);
      if (gt.norm() >= g.norm()) break;
      x = trial;
      f = total_value(objectives, x);
    }
    g = total_gradient(objectives, x);
  }
  sol.x = x;
  sol.value = f;
  sol.gradNorm = g.norm();
  sol.iterations = it;
  if (sol.gradNorm > tol)
    throw NumericalFailure("centralized_solve: gradient norm " + std::to_string(sol.gradNorm) +
                           " above tolerance after " + std::to_string(it) + " iterations");
  return sol;
}

}  // namespace ccdqm
