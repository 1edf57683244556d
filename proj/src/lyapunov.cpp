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

#include "ccdqm/lyapunov.hpp"

#include "ccdqm/simulator.hpp"

namespace ccdqm {

LyapunovTracker::LyapunovTracker(const Graph& graph, const std::vector<LocalObjective>& objectives,
                                 const Vector& x_star, double c, double r_weight)
    : op_(incidence(graph)), ls_(graph.signless_laplacian()), c_(c), r_weight_(r_weight) {
  const auto n = static_cast<Eigen::Index>(graph.size());
  const auto d = x_star.size();
  if (objectives.size() != graph.size()) throw InvalidInput("lyapunov: one objective per agent");
  if (!(c > 0.0)) throw InvalidInput("lyapunov: c must be > 0");
  if (!(r_weight >= 0.0)) throw InvalidInput("lyapunov: r_weight must be >= 0");
  x_star_ = x_star.transpose().replicate(n, 1);
  phi_star_.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    phi_star_.row(i) = -objectives[static_cast<std::size_t>(i)].gradient(x_star).transpose();

  // L^+ from the eigendecomposition, dropping the null space.
  Eigen::SelfAdjointEigenSolver<Matrix> es(graph.laplacian());
  Vector inv = Vector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i)
    if (es.eigenvalues()(i) > kEigenTolerance) inv(i) = 1.0 / es.eigenvalues()(i);
  const Matrix l_pinv = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  r_star_ = op_.M * (l_pinv * phi_star_) / (4.0 * c);
  r_ = Matrix::Zero(op_.M.rows(), d);
}

void LyapunovTracker::advance(const Simulator& sim) { r_ += 0.25 * op_.M * sim.stacked_y(); }

LyapunovComponents LyapunovTracker::evaluate(const Simulator& sim) const {
  const Matrix x = sim.stacked_x();
  const Matrix dx = x - x_star_;
  LyapunovComponents v;
  v.primal = 0.5 * c_ * (dx.transpose() * ls_ * dx).trace();
  v.dual = 4.0 * c_ * (r_ - r_star_).squaredNorm();
  v.error = r_weight_ * (sim.stacked_y() - x).squaredNorm();
  return v;
}

double LyapunovTracker::phi_mismatch(const Simulator& sim) const {
  return (sim.stacked_phi() - 2.0 * c_ * op_.M.transpose() * r_).lpNorm<Eigen::Infinity>();
}

}  // namespace ccdqm
