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

#ifndef CCDQM_GRAPH_HPP_
#define CCDQM_GRAPH_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ccdqm/common.hpp"

namespace ccdqm {

/// Zero test used for Laplacian eigenvalues.
inline constexpr double kEigenTolerance = 1e-9;

/// Undirected simple graph on agents 0..n-1. Edges are stored as (i, j)
/// with i < j, sorted lexicographically; neighbor lists are sorted.
class Graph {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;

  /// Throws InvalidInput on n < 2, self-loops, duplicates or out-of-range ids.
  Graph(std::size_t n, std::vector<Edge> edges);

  std::size_t size() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<std::size_t>& neighbors(std::size_t i) const { return neighbors_[i]; }
  std::size_t degree(std::size_t i) const { return neighbors_[i].size(); }

  Matrix adjacency() const;
  Matrix degree_matrix() const;
  /// Signed Laplacian D - W.
  Matrix laplacian() const;
  /// Unsigned Laplacian D + W.
  Matrix signless_laplacian() const;

  static Graph complete(std::size_t n);
  static Graph ring(std::size_t n);
  static Graph path(std::size_t n);

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> neighbors_;
};

struct SpectralSummary {
  Vector lambda;      // eigenvalues of L, ascending
  Vector lambdaHat;   // eigenvalues of L_s, ascending
  bool connected = false;
  bool nonBipartite = false;

  double lambda2() const { return lambda(1); }
  double lambdaMax() const { return lambda(lambda.size() - 1); }
  double lambdaHatMin() const { return lambdaHat(0); }
  double lambdaHatMax() const { return lambdaHat(lambdaHat.size() - 1); }
};

/// Signed and unsigned edge operators, one row per edge orientation, with
/// L = 0.5 * M^T M and L_s = 0.5 * Ms^T Ms.
struct EdgeOperator {
  Matrix M;
  Matrix Ms;
};

struct ValidationReport {
  bool pass = false;
  std::vector<std::string> failures;
  std::string describe() const;
};

/// Erdos-Renyi sample: every pair (i, j) is an edge with probability tau.
Graph gen_random_graph(std::size_t n, double tau, std::uint64_t seed);

/// Like gen_random_graph but resamples with shifted seeds until the draw is
/// connected and non-bipartite. Throws after max_attempts failures.
Graph gen_admissible_graph(std::size_t n, double tau, std::uint64_t seed,
                           int max_attempts = 100);

SpectralSummary spectra(const Graph& g);
ValidationReport validate_assumptions(const SpectralSummary& s);
EdgeOperator incidence(const Graph& g);

/// Two-coloring by BFS; independent of the spectral test.
bool is_bipartite_bfs(const Graph& g);

/// Text format: "n <count>" then one "i j" per line, 1-indexed, i < j.
/// Blank lines and '#' comments are ignored.
Graph read_graph(std::istream& in);
Graph read_graph_file(const std::string& path);
void write_graph(std::ostream& out, const Graph& g);
void write_graph_file(const std::string& path, const Graph& g);

}  // namespace ccdqm

#endif  // CCDQM_GRAPH_HPP_
