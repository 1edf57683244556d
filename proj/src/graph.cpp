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

#include "ccdqm/graph.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <sstream>

namespace ccdqm {

Graph::Graph(std::size_t n, std::vector<Edge> edges) : n_(n), neighbors_(n) {
  if (n < 2) throw InvalidInput("graph needs at least 2 agents, got " + std::to_string(n));
  for (auto& [i, j] : edges) {
    if (i >= n || j >= n)
      throw InvalidInput("edge (" + std::to_string(i) + ", " + std::to_string(j) +
                         ") out of range for n = " + std::to_string(n));
    if (i == j) throw InvalidInput("self-loop at agent " + std::to_string(i));
    if (i > j) std::swap(i, j);
  }
  std::sort(edges.begin(), edges.end());
  if (auto dup = std::adjacent_find(edges.begin(), edges.end()); dup != edges.end())
    throw InvalidInput("duplicate edge (" + std::to_string(dup->first) + ", " +
                       std::to_string(dup->second) + ")");
  edges_ = std::move(edges);
  for (const auto& [i, j] : edges_) {
    neighbors_[i].push_back(j);
    neighbors_[j].push_back(i);
  }
  for (auto& nb : neighbors_) std::sort(nb.begin(), nb.end());
}

Matrix Graph::adjacency() const {
  Matrix w = Matrix::Zero(n_, n_);
  for (const auto& [i, j] : edges_) w(i, j) = w(j, i) = 1.0;
  return w;
}

Matrix Graph::degree_matrix() const {
  Matrix d = Matrix::Zero(n_, n_);
  for (std::size_t i = 0; i < n_; ++i) d(i, i) = static_cast<double>(degree(i));
  return d;
}

Matrix Graph::laplacian() const { return degree_matrix() - adjacency(); }
Matrix Graph::signless_laplacian() const { return degree_matrix() + adjacency(); }

Graph Graph::complete(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return Graph(n, std::move(e));
}

Graph Graph::ring(std::size_t n) {
  if (n < 3) throw InvalidInput("ring needs at least 3 agents");
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return Graph(n, std::move(e));
}

Graph Graph::path(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph(n, std::move(e));
}

std::string ValidationReport::describe() const {
  if (pass) return "ok";
  std::string s;
  for (const auto& f : failures) {
    if (!s.empty()) s += "; ";
    s += f;
  }
  return s;
}

Graph gen_random_graph(std::size_t n, double tau, std::uint64_t seed) {
  if (n < 2) throw InvalidInput("gen_random_graph: n must be >= 2");
  if (!(tau > 0.0 && tau <= 1.0))
    throw InvalidInput("gen_random_graph: tau must lie in (0, 1], got " + std::to_string(tau));
  Rng rng = derive_stream(seed, 0x67u);
  std::vector<Graph::Edge> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (uniform01(rng) < tau) e.emplace_back(i, j);
  return Graph(n, std::move(e));
}

Graph gen_admissible_graph(std::size_t n, double tau, std::uint64_t seed, int max_attempts) {
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Graph g = gen_random_graph(n, tau, seed + static_cast<std::uint64_t>(attempt));
    if (validate_assumptions(spectra(g)).pass) return g;
  }
  throw InvalidInput("no connected non-bipartite graph found for n = " + std::to_string(n) +
                     ", tau = " + std::to_string(tau) + " after " +
                     std::to_string(max_attempts) + " attempts");
}

SpectralSummary spectra(const Graph& g) {
  SpectralSummary s;
  Eigen::SelfAdjointEigenSolver<Matrix> lap(g.laplacian(), Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Matrix> slap(g.signless_laplacian(), Eigen::EigenvaluesOnly);
  s.lambda = lap.eigenvalues();
  s.lambdaHat = slap.eigenvalues();
  s.connected = s.lambda(1) > kEigenTolerance;
  s.nonBipartite = s.lambdaHat(0) > kEigenTolerance;
  return s;
}

ValidationReport validate_assumptions(const SpectralSummary& s) {
  ValidationReport r;
  if (!s.connected) r.failures.emplace_back("graph not connected");
  if (!s.nonBipartite) r.failures.emplace_back("L_s not positive definite");
  r.pass = r.failures.empty();
  return r;
}

EdgeOperator incidence(const Graph& g) {
  const std::size_t m = g.edge_count();
  EdgeOperator op;
  op.M = Matrix::Zero(2 * m, g.size());
  op.Ms = Matrix::Zero(2 * m, g.size());
  // Rows [0, m) hold i->j, rows [m, 2m) hold j->i.
  for (std::size_t e = 0; e < m; ++e) {
    const auto [i, j] = g.edges()[e];
    op.M(e, i) = 1.0;
    op.M(e, j) = -1.0;
    op.M(m + e, j) = 1.0;
    op.M(m + e, i) = -1.0;
    op.Ms(e, i) = op.Ms(e, j) = 1.0;
    op.Ms(m + e, i) = op.Ms(m + e, j) = 1.0;
  }
  return op;
}

bool is_bipartite_bfs(const Graph& g) {
  std::vector<int> color(g.size(), -1);
  for (std::size_t start = 0; start < g.size(); ++start) {
    if (color[start] != -1) continue;
    color[start] = 0;
    std::queue<std::size_t> q;
    q.push(start);
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop();
      for (std::size_t w : g.neighbors(u)) {
        if (color[w] == -1) {
          color[w] = 1 - color[u];
          q.push(w);
        } else if (color[w] == color[u]) {
          return false;
        }
      }
    }
  }
  return true;
}

Graph read_graph(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::size_t n = 0;
  bool have_header = false;
  std::vector<Graph::Edge> edges;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    auto fail = [&](const std::string& what) {
      return InvalidInput("graph file line " + std::to_string(lineno) + ": " + what);
    };
    if (!have_header) {
      if (first != "n" || !(ls >> n)) throw fail("expected header 'n <count>'");
      have_header = true;
    } else {
      long long i = 0, j = 0;
      std::istringstream es(line);
      if (!(es >> i >> j)) throw fail("expected 'i j'");
      std::string rest;
      if (es >> rest) throw fail("trailing content '" + rest + "'");
      if (i < 1 || j < 1 || static_cast<std::size_t>(i) > n || static_cast<std::size_t>(j) > n)
        throw fail("agent index out of range 1.." + std::to_string(n));
      if (i == j) throw fail("self-loop");
      if (i > j) throw fail("expected i < j");
      Graph::Edge e{static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1)};
      if (std::find(edges.begin(), edges.end(), e) != edges.end()) throw fail("duplicate edge");
      edges.push_back(e);
    }
  }
  if (!have_header) throw InvalidInput("graph file: missing header 'n <count>'");
  return Graph(n, std::move(edges));
}

Graph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open graph file '" + path + "'");
  return read_graph(in);
}

void write_graph(std::ostream& out, const Graph& g) {
  out << "n " << g.size() << '\n';
  for (const auto& [i, j] : g.edges()) out << i + 1 << ' ' << j + 1 << '\n';
}

void write_graph_file(const std::string& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write graph file '" + path + "'");
  write_graph(out, g);
}

}  // namespace ccdqm
