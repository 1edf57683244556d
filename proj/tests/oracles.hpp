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

#ifndef CCDQM_TESTS_ORACLES_HPP_
#define CCDQM_TESTS_ORACLES_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "ccdqm/graph.hpp"
#include "ccdqm/objective.hpp"

namespace ccdqm::testing {

/// Stacked-vector DQM recursion written from the compact matrix form:
///   x+ = x - Dt^{-1} (grad f(x) + phi + c (L kron I) y),  Dt = 2c (D kron I) + blkdiag hess f_i(y)
///   y+ = x+ (identity compressor, zero threshold)
///   phi+ = phi + c (L kron I) y+
/// Dense LU on the full nd x nd system, no per-agent structure.
class MatrixDqmOracle {
 public:
  MatrixDqmOracle(const Graph& g, std::vector<LocalObjective> objs, double c, const Matrix& x0)
      : objs_(std::move(objs)), c_(c), n_(g.size()), d_(static_cast<std::size_t>(x0.cols())) {
    const Eigen::Index nd = static_cast<Eigen::Index>(n_ * d_);
    const Matrix I = Matrix::Identity(static_cast<Eigen::Index>(d_), static_cast<Eigen::Index>(d_));
    lk_ = kron(g.laplacian(), I);
    dk_ = kron(g.degree_matrix(), I);
    x_ = Vector(nd);
    for (std::size_t i = 0; i < n_; ++i) block(x_, i) = x0.row(static_cast<Eigen::Index>(i)).transpose();
    y_ = Vector::Zero(nd);
    phi_ = Vector::Zero(nd);
  }

  void step() {
    const Eigen::Index nd = x_.size();
    Matrix dt = 2.0 * c_ * dk_;
    Vector grad(nd);
    for (std::size_t i = 0; i < n_; ++i) {
      const auto off = static_cast<Eigen::Index>(i * d_);
      const auto dd = static_cast<Eigen::Index>(d_);
      dt.block(off, off, dd, dd) += objs_[i].hessian(block(y_, i));
      grad.segment(off, dd) = objs_[i].gradient(block(x_, i));
    }
    const Vector rhs = grad + phi_ + c_ * lk_ * y_;
    x_ = x_ - dt.partialPivLu().solve(rhs);
    y_ = x_;
    phi_ = phi_ + c_ * lk_ * y_;
  }

  Matrix stacked_x() const { return unstack(x_); }
  Matrix stacked_phi() const { return unstack(phi_); }

 private:
  static Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j)
        out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
  }
  Vector block(const Vector& v, std::size_t i) const {
    return v.segment(static_cast<Eigen::Index>(i * d_), static_cast<Eigen::Index>(d_));
  }
  Eigen::VectorBlock<Vector> block(Vector& v, std::size_t i) {
    return v.segment(static_cast<Eigen::Index>(i * d_), static_cast<Eigen::Index>(d_));
  }
  Matrix unstack(const Vector& v) const {
    Matrix m(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(d_));
    for (std::size_t i = 0; i < n_; ++i) m.row(static_cast<Eigen::Index>(i)) = block(v, i).transpose();
    return m;
  }

  std::vector<LocalObjective> objs_;
  double c_;
  std::size_t n_, d_;
  Matrix lk_, dk_;
  Vector x_, y_, phi_;
};

/// Per-agent DQM step with the Hessian at x (the uncompressed base method).
inline Matrix dqm_reference_step(const Graph& g, const std::vector<LocalObjective>& objs, double c,
                                 const Matrix& x, Matrix& phi) {
  const auto n = static_cast<Eigen::Index>(g.size());
  const auto d = x.cols();
  Matrix next(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const Vector xi = x.row(i).transpose();
    Vector lap = Vector::Zero(d);
    for (auto j : g.neighbors(ui)) lap += xi - x.row(static_cast<Eigen::Index>(j)).transpose();
    const Matrix h = 2.0 * c * static_cast<double>(g.degree(ui)) * Matrix::Identity(d, d) +
                     objs[ui].hessian(xi);
    next.row(i) = (xi - h.ldlt().solve(objs[ui].gradient(xi) + c * lap + phi.row(i).transpose()))
                      .transpose();
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector lap = Vector::Zero(d);
    for (auto j : g.neighbors(static_cast<std::size_t>(i)))
      lap += next.row(i).transpose() - next.row(static_cast<Eigen::Index>(j)).transpose();
    phi.row(i) += c * lap.transpose();
  }
  return next;
}

/// Limit of the compression right-hand side as c grows, expanded by hand from
/// G(beta) / (3 c ln + 2 c beta ln + c ln^2 / (beta l2)).
inline double f_limit_oracle(double l2, double ln, double lh1, double lhn, double beta) {
  return (lh1 / 2.0 - lhn * lhn / (beta * l2)) /
         (3.0 * ln + 2.0 * beta * ln + ln * ln / (beta * l2));
}

/// Two-stage brute-force grid: 10^4 log-spaced points on [1e-3, 1e3], then
/// 10^4 points across the two cells around the best point.
inline double grid_argmax_beta(const SpectralSummary& s) {
  auto f = [&](double b) {
    return f_limit_oracle(s.lambda2(), s.lambdaMax(), s.lambdaHatMin(), s.lambdaHatMax(), b);
  };
  const int n = 10000;
  const double lo = std::log(1e-3), hi = std::log(1e7);
  const double step = (hi - lo) / (n - 1);
  int best = 0;
  for (int i = 1; i < n; ++i)
    if (f(std::exp(lo + i * step)) > f(std::exp(lo + best * step))) best = i;
  const double a = lo + (best - 1) * step, b = lo + (best + 1) * step;
  double arg = std::exp(lo + best * step);
  for (int i = 0; i < n; ++i) {
    const double x = std::exp(a + (b - a) * i / (n - 1));
    if (f(x) > f(arg)) arg = x;
  }
  return arg;
}

}  // namespace ccdqm::testing

#endif  // CCDQM_TESTS_ORACLES_HPP_
