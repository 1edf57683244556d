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

#ifndef CCDQM_LYAPUNOV_HPP_
#define CCDQM_LYAPUNOV_HPP_

#include <vector>

#include "ccdqm/common.hpp"
#include "ccdqm/graph.hpp"
#include "ccdqm/objective.hpp"

namespace ccdqm {

class Simulator;

struct LyapunovComponents {
  double primal = 0.0;  // c/2 |x_k - x*|^2 in the L_s metric
  double dual = 0.0;    // 4c |r_k - r*|^2
  double error = 0.0;   // r_weight |e_k|^2 with e_k = y_k - x_k
  double total() const { return primal + dual + error; }
};

/// Tracks the edge variable r_k (r_0 = 0, r_{k+1} = r_k + M y_{k+1} / 4) that
/// reproduces the dual as phi_k = 2c M^T r_k, and evaluates the Lyapunov
/// function against the optimum. r* is the minimum-norm solution of
/// 2c M^T r* = phi* with phi*_i = -grad f_i(x*).
class LyapunovTracker {
 public:
  LyapunovTracker(const Graph& graph, const std::vector<LocalObjective>& objectives,
                  const Vector& x_star, double c, double r_weight);

  /// Call after every Simulator::iterate with the new state.
  void advance(const Simulator& sim);

  LyapunovComponents evaluate(const Simulator& sim) const;

  /// max |phi_k - 2c M^T r_k| over all entries.
  double phi_mismatch(const Simulator& sim) const;

  const Matrix& r() const { return r_; }
  const Matrix& r_star() const { return r_star_; }
  const Matrix& phi_star() const { return phi_star_; }
  double r_weight() const { return r_weight_; }

 private:
  EdgeOperator op_;
  Matrix ls_;
  Matrix x_star_;    // n x d, every row x*
  Matrix phi_star_;  // n x d
  Matrix r_;         // 2|E| x d
  Matrix r_star_;
  double c_;
  double r_weight_;
};

}  // namespace ccdqm

#endif  // CCDQM_LYAPUNOV_HPP_
