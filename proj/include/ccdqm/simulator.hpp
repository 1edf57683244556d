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

#ifndef CCDQM_SIMULATOR_HPP_
#define CCDQM_SIMULATOR_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ccdqm/common.hpp"
#include "ccdqm/compressor.hpp"
#include "ccdqm/graph.hpp"
#include "ccdqm/objective.hpp"

namespace ccdqm {

/// Trigger threshold for the step k -> k+1. Geometric gives alpha * rho^k,
/// i.e. the first step uses alpha.
struct ThresholdSchedule {
  enum class Kind { Zero, Geometric };
  Kind kind = Kind::Zero;
  double alpha = 0.0;
  double rho = 0.0;

  static ThresholdSchedule zero() { return {}; }
  static ThresholdSchedule geometric(double alpha, double rho);
  double at(std::size_t k) const;
  bool is_zero() const { return kind == Kind::Zero; }
};

enum class BitAccounting { PerLink, PerBroadcast };

struct RunConfig {
  double c = 1.0;
  ThresholdSchedule schedule;
  Compressor compressor;
  std::size_t maxIter = 1000;
  double tol = 1e-12;
  std::uint64_t seed = 1;     // initial iterates
  std::uint64_t replica = 0;  // selects the compressor randomness
  BitAccounting accounting = BitAccounting::PerLink;
  bool hessianCache = true;   // false refactorizes every agent every iteration
  std::size_t threads = 1;

  void validate() const;
};

/// DQM, C-DQM, Q-DQM or CC-DQM from the (schedule, compressor) pair.
std::string variant_name(const ThresholdSchedule& s, const Compressor& c);

struct AgentState {
  Vector x;
  Vector ySelf;
  std::vector<Vector> yNeighbors;  // aligned with Graph::neighbors(i)
  Vector phi;
  std::size_t hessVersion = 0;     // iteration at which ySelf last triggered a refresh
  Eigen::LLT<Matrix> cachedFactor; // of 2 c d_i I + hess f_i(ySelf)
  std::uint64_t triggers = 0;
  std::uint64_t refreshes = 0;
};

struct CommunicationOutcome {
  std::vector<char> triggered;
  std::size_t triggers = 0;
  std::size_t refreshes = 0;
  std::uint64_t bitsPerLink = 0;
  std::uint64_t bitsPerBroadcast = 0;
  double threshold = 0.0;
};

struct StepStats {
  CommunicationOutcome comm;
  double stepNormSq = 0.0;  // |x_{k+1} - x_k|^2 over all agents
};

/// Iteration-synchronous simulator of CC-DQM and its ablations. Each
/// iteration runs the local primal steps, then the trigger/compress/broadcast
/// phase, then the dual steps. All randomness comes from per-(replica, agent,
/// iteration) streams, so results do not depend on the thread count.
class Simulator {
 public:
  /// x0 holds one row per agent; when absent it is drawn standard normal
  /// from config.seed. Throws InvalidInput if the graph is disconnected or
  /// bipartite, or dimensions disagree.
  Simulator(Graph graph, std::vector<LocalObjective> objectives, RunConfig config,
            std::optional<Matrix> x0 = std::nullopt);

  const Graph& graph() const { return graph_; }
  const std::vector<LocalObjective>& objectives() const { return objectives_; }
  const RunConfig& config() const { return config_; }
  const std::vector<AgentState>& agents() const { return agents_; }
  std::size_t agent_count() const { return agents_.size(); }
  std::size_t dimension() const { return dim_; }
  std::size_t iteration() const { return k_; }

  /// Row i holds agent i's vector.
  Matrix stacked_x() const;
  Matrix stacked_y() const;
  Matrix stacked_phi() const;

  /// x_{i,k} - (2 c d_i I + hess f_i(y_{i,k}))^{-1}
  ///   (grad f_i(x_{i,k}) + c sum_j (y_{i,k} - y_{j,k}) + phi_{i,k}).
  Vector local_primal_step(std::size_t i) const;

  /// Installs x_{k+1}, then every agent whose innovation |x_{i,k+1} - y_{i,k}|
  /// reaches the threshold broadcasts the compressed innovation. Senders and
  /// receivers apply the same payload. Refactorizes where ySelf changed.
  CommunicationOutcome trigger_and_communicate(const std::vector<Vector>& x_next);

  /// phi_i += c sum_j (y_i - y_j) with the post-communication y.
  void dual_step(std::size_t i);

  StepStats iterate();

  /// Overwrites the full state (all agents see consistent y) and refactorizes.
  /// Used to start from a known point such as the fixed point.
  void set_state(const Matrix& x, const Matrix& y, const Matrix& phi);

  /// Every neighbor copy equals the owner's ySelf bit for bit.
  bool neighbor_copies_consistent() const;

  std::uint64_t total_refreshes() const;
  std::uint64_t total_triggers() const;

 private:
  void refactor(std::size_t i);

  Graph graph_;
  std::vector<LocalObjective> objectives_;
  RunConfig config_;
  std::size_t dim_ = 0;
  std::size_t k_ = 0;
  std::vector<AgentState> agents_;
};

}  // namespace ccdqm

#endif  // CCDQM_SIMULATOR_HPP_
