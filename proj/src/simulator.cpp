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

#include "ccdqm/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "parallel.hpp"

namespace ccdqm {

ThresholdSchedule ThresholdSchedule::geometric(double alpha, double rho) {
  if (!(alpha > 0.0)) throw InvalidInput("threshold schedule: alpha must be > 0");
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidInput("threshold schedule: rho must lie in (0, 1)");
  return {Kind::Geometric, alpha, rho};
}

double ThresholdSchedule::at(std::size_t k) const {
  if (kind == Kind::Zero) return 0.0;
  return alpha * std::pow(rho, static_cast<double>(k));
}

void RunConfig::validate() const {
  if (!(c > 0.0)) throw InvalidInput("penalty c must be > 0");
  if (schedule.kind == ThresholdSchedule::Kind::Geometric) {
    if (!(schedule.alpha > 0.0)) throw InvalidInput("threshold alpha must be > 0");
    if (!(schedule.rho > 0.0 && schedule.rho < 1.0))
      throw InvalidInput("threshold rho must lie in (0, 1)");
  }
  if (threads == 0) throw InvalidInput("threads must be >= 1");
}

std::string variant_name(const ThresholdSchedule& s, const Compressor& c) {
  const bool censored = !s.is_zero();
  const bool compressed = c.kind() != Compressor::Kind::Identity;
  if (censored && compressed) return "CC-DQM";
  if (censored) return "C-DQM";
  if (compressed) return "Q-DQM";
  return "DQM";
}

Simulator::Simulator(Graph graph, std::vector<LocalObjective> objectives, RunConfig config,
                     std::optional<Matrix> x0)
    : graph_(std::move(graph)), objectives_(std::move(objectives)), config_(config) {
  config_.validate();
  const std::size_t n = graph_.size();
  if (objectives_.size() != n)
    throw InvalidInput("simulator: " + std::to_string(objectives_.size()) +
                       " objectives for " + std::to_string(n) + " agents");
  const auto report = validate_assumptions(spectra(graph_));
  if (!report.pass) throw InvalidInput("simulator: graph assumption failed: " + report.describe());
  dim_ = objectives_.front().dimension();
  for (const auto& o : objectives_)
    if (o.dimension() != dim_) throw InvalidInput("simulator: objectives differ in dimension");
  if (x0 && (static_cast<std::size_t>(x0->rows()) != n ||
             static_cast<std::size_t>(x0->cols()) != dim_))
    throw InvalidInput("simulator: x0 must be n x d");

  agents_.resize(n);
  Rng rng = derive_stream(config_.seed, 0x30u);
  std::normal_distribution<double> normal;
  for (std::size_t i = 0; i < n; ++i) {
    auto& a = agents_[i];
    if (x0) {
      a.x = x0->row(static_cast<Eigen::Index>(i)).transpose();
    } else {
      a.x.resize(dim_);
      for (auto& v : a.x) v = normal(rng);
    }
    a.ySelf = Vector::Zero(dim_);
    a.yNeighbors.assign(graph_.degree(i), Vector::Zero(dim_));
    a.phi = Vector::Zero(dim_);
  }
  detail::parallel_for(n, config_.threads, [&](std::size_t i) { refactor(i); });
}

void Simulator::refactor(std::size_t i) {
  auto& a = agents_[i];
  Matrix m = objectives_[i].hessian(a.ySelf);
  m.diagonal().array() += 2.0 * config_.c * static_cast<double>(graph_.degree(i));
  a.cachedFactor.compute(m);
  if (a.cachedFactor.info() != Eigen::Success)
    throw NumericalFailure("agent " + std::to_string(i) + ": primal system not positive definite"
                           " at iteration " + std::to_string(k_));
  a.hessVersion = k_;
  ++a.refreshes;
}

Matrix Simulator::stacked_x() const {
  Matrix m(agents_.size(), dim_);
  for (std::size_t i = 0; i < agents_.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = agents_[i].x;
  return m;
}

Matrix Simulator::stacked_y() const {
  Matrix m(agents_.size(), dim_);
  for (std::size_t i = 0; i < agents_.size(); ++i)
    m.row(static_cast<Eigen::Index>(i)) = agents_[i].ySelf;
  return m;
}

Matrix Simulator::stacked_phi() const {
  Matrix m(agents_.size(), dim_);
  for (std::size_t i = 0; i < agents_.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = agents_[i].phi;
  return m;
}

Vector Simulator::local_primal_step(std::size_t i) const {
  const auto& a = agents_[i];
  Vector rhs = objectives_[i].gradient(a.x) + a.phi;
  Vector disagreement = Vector::Zero(dim_);
  for (const auto& yj : a.yNeighbors) disagreement += a.ySelf - yj;
  rhs += config_.c * disagreement;
  Vector step = a.cachedFactor.solve(rhs);
  if (!step.allFinite())
    throw NumericalFailure("agent " + std::to_string(i) + ": primal solve produced non-finite"
                           " values at iteration " + std::to_string(k_));
  return a.x - step;
}

CommunicationOutcome Simulator::trigger_and_communicate(const std::vector<Vector>& x_next) {
  const std::size_t n = agents_.size();
  if (x_next.size() != n) throw InvalidInput("trigger_and_communicate: need one x per agent");
  CommunicationOutcome out;
  out.threshold = config_.schedule.at(k_);
  out.triggered.assign(n, 0);
  std::vector<CompressedMessage> messages(n);

  detail::parallel_for(n, config_.threads, [&](std::size_t i) {
    auto& a = agents_[i];
    a.x = x_next[i];
    const Vector innovation = a.x - a.ySelf;
    if (innovation.norm() >= out.threshold) {
      Rng rng = derive_stream(config_.seed, 0x40u, config_.replica, i, k_);
      messages[i] = compress(config_.compressor, innovation, rng);
      out.triggered[i] = 1;
    }
  });

  // Senders and receivers add the same payload to the same prior value.
  detail::parallel_for(n, config_.threads, [&](std::size_t i) {
    auto& a = agents_[i];
    if (out.triggered[i]) a.ySelf += messages[i].payload;
    const auto& nb = graph_.neighbors(i);
    for (std::size_t p = 0; p < nb.size(); ++p)
      if (out.triggered[nb[p]]) a.yNeighbors[p] += messages[nb[p]].payload;
  });

  for (std::size_t i = 0; i < n; ++i) {
    if (!out.triggered[i]) continue;
    ++out.triggers;
    ++agents_[i].triggers;
    out.bitsPerBroadcast += messages[i].bits;
    out.bitsPerLink += messages[i].bits * graph_.degree(i);
  }

  ++k_;
  detail::parallel_for(n, config_.threads, [&](std::size_t i) {
    if (out.triggered[i] || !config_.hessianCache) refactor(i);
  });
  out.refreshes = config_.hessianCache ? out.triggers : n;
  return out;
}

void Simulator::dual_step(std::size_t i) {
  auto& a = agents_[i];
  Vector disagreement = Vector::Zero(dim_);
  for (const auto& yj : a.yNeighbors) disagreement += a.ySelf - yj;
  a.phi += config_.c * disagreement;
}

StepStats Simulator::iterate() {
  const std::size_t n = agents_.size();
  std::vector<Vector> x_next(n);
  detail::parallel_for(n, config_.threads, [&](std::size_t i) { x_next[i] = local_primal_step(i); });
  StepStats stats;
  for (std::size_t i = 0; i < n; ++i) stats.stepNormSq += (x_next[i] - agents_[i].x).squaredNorm();
  stats.comm = trigger_and_communicate(x_next);
  detail::parallel_for(n, config_.threads, [&](std::size_t i) { dual_step(i); });
  return stats;
}

void Simulator::set_state(const Matrix& x, const Matrix& y, const Matrix& phi) {
  const auto n = static_cast<Eigen::Index>(agents_.size());
  const auto d = static_cast<Eigen::Index>(dim_);
  for (const Matrix* m : {&x, &y, &phi})
    if (m->rows() != n || m->cols() != d) throw InvalidInput("set_state: matrices must be n x d");
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    auto& a = agents_[i];
    const auto r = static_cast<Eigen::Index>(i);
    a.x = x.row(r).transpose();
    a.ySelf = y.row(r).transpose();
    a.phi = phi.row(r).transpose();
    const auto& nb = graph_.neighbors(i);
    for (std::size_t p = 0; p < nb.size(); ++p)
      a.yNeighbors[p] = y.row(static_cast<Eigen::Index>(nb[p])).transpose();
  }
  detail::parallel_for(agents_.size(), config_.threads, [&](std::size_t i) { refactor(i); });
}

bool Simulator::neighbor_copies_consistent() const {
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const auto& nb = graph_.neighbors(i);
    for (std::size_t p = 0; p < nb.size(); ++p)
      if (agents_[i].yNeighbors[p] != agents_[nb[p]].ySelf) return false;
  }
  return true;
}

std::uint64_t Simulator::total_refreshes() const {
  std::uint64_t s = 0;
  for (const auto& a : agents_) s += a.refreshes;
  return s;
}

std::uint64_t Simulator::total_triggers() const {
  std::uint64_t s = 0;
  for (const auto& a : agents_) s += a.triggers;
  return s;
}

}  // namespace ccdqm
