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

#include "ccdqm/objective.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace ccdqm {
namespace {

// log(1 + exp(-t)) without overflow.
double softplus_neg(double t) {
  return t > 0 ? std::log1p(std::exp(-t)) : -t + std::log1p(std::exp(t));
}

// 1 / (1 + exp(t))
double sigmoid_neg(double t) {
  if (t >= 0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

}  // namespace

ConvexityConstants aggregate(const std::vector<ConvexityConstants>& per_agent) {
  if (per_agent.empty()) throw InvalidInput("aggregate: no agents");
  ConvexityConstants out{std::numeric_limits<double>::infinity(), 0.0};
  for (const auto& c : per_agent) {
    out.v = std::min(out.v, c.v);
    out.ell = std::max(out.ell, c.ell);
  }
  return out;
}

LocalObjective LocalObjective::quadratic(Matrix A, Vector b) {
  if (A.rows() != A.cols() || A.rows() != b.size() || A.rows() == 0)
    throw InvalidInput("quadratic objective: A must be d x d and b length d");
  if (!A.isApprox(A.transpose(), 1e-12))
    throw InvalidInput("quadratic objective: A must be symmetric");
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success)
    throw InvalidInput("quadratic objective: A must be positive definite");
  LocalObjective o;
  o.kind_ = Kind::Quadratic;
  o.dim_ = static_cast<std::size_t>(b.size());
  o.A_ = std::move(A);
  o.b_ = std::move(b);
  return o;
}

LocalObjective LocalObjective::logistic(Matrix features, Vector labels, double lambda_reg) {
  if (features.rows() < 1) throw InvalidInput("logistic objective: need at least one sample");
  if (features.rows() != labels.size())
    throw InvalidInput("logistic objective: feature rows and labels differ in count");
  if (features.cols() < 1) throw InvalidInput("logistic objective: zero-dimensional features");
  for (Eigen::Index j = 0; j < labels.size(); ++j)
    if (labels(j) != 1.0 && labels(j) != -1.0)
      throw InvalidInput("logistic objective: labels must be -1 or +1");
  if (!(lambda_reg >= 0.0)) throw InvalidInput("logistic objective: lambda_reg must be >= 0");
  LocalObjective o;
  o.kind_ = Kind::Logistic;
  o.dim_ = static_cast<std::size_t>(features.cols());
  o.features_ = std::move(features);
  o.labels_ = std::move(labels);
  o.lambda_reg_ = lambda_reg;
  return o;
}

void LocalObjective::check_dim(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != dim_)
    throw InvalidInput("objective expects dimension " + std::to_string(dim_) + ", got " +
                       std::to_string(x.size()));
}

double LocalObjective::value(const Vector& x) const {
  check_dim(x);
  if (kind_ == Kind::Quadratic) return 0.5 * x.dot(A_ * x) - b_.dot(x);
  const Vector margins = labels_.cwiseProduct(features_ * x);
  double loss = 0.0;
  for (Eigen::Index j = 0; j < margins.size(); ++j) loss += softplus_neg(margins(j));
  return loss / static_cast<double>(margins.size()) + 0.5 * lambda_reg_ * x.squaredNorm();
}

Vector LocalObjective::gradient(const Vector& x) const {
  check_dim(x);
  if (kind_ == Kind::Quadratic) return A_ * x - b_;
  const Vector margins = labels_.cwiseProduct(features_ * x);
  Vector w(margins.size());
  for (Eigen::Index j = 0; j < margins.size(); ++j) w(j) = -labels_(j) * sigmoid_neg(margins(j));
  return features_.transpose() * w / static_cast<double>(margins.size()) + lambda_reg_ * x;
}

Matrix LocalObjective::hessian(const Vector& x) const {
  check_dim(x);
  if (kind_ == Kind::Quadratic) return A_;
  const Vector margins = labels_.cwiseProduct(features_ * x);
  Vector w(margins.size());
  for (Eigen::Index j = 0; j < margins.size(); ++j) {
    const double s = sigmoid_neg(margins(j));
    w(j) = s * (1.0 - s);
  }
  const double inv_m = 1.0 / static_cast<double>(margins.size());
  Matrix h = features_.transpose() * (w * inv_m).asDiagonal() * features_;
  h.diagonal().array() += lambda_reg_;
  return h;
}

Evaluation LocalObjective::value_grad_hess(const Vector& x) const {
  return {value(x), gradient(x), hessian(x)};
}

ConvexityConstants LocalObjective::convexity_constants() const {
  if (kind_ == Kind::Quadratic) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(A_, Eigen::EigenvaluesOnly);
    return {es.eigenvalues()(0), es.eigenvalues()(es.eigenvalues().size() - 1)};
  }
  if (!(lambda_reg_ > 0.0)) throw InvalidInput("not strongly convex");
  const Matrix cov =
      features_.transpose() * features_ / static_cast<double>(features_.rows());
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov, Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues()(es.eigenvalues().size() - 1);
  return {lambda_reg_, lambda_reg_ + top / 4.0};
}

double total_value(const std::vector<LocalObjective>& objs, const Vector& x) {
  double s = 0.0;
  for (const auto& o : objs) s += o.value(x);
  return s;
}

Vector total_gradient(const std::vector<LocalObjective>& objs, const Vector& x) {
  Vector g = Vector::Zero(x.size());
  for (const auto& o : objs) g += o.gradient(x);
  return g;
}

Matrix total_hessian(const std::vector<LocalObjective>& objs, const Vector& x) {
  Matrix h = Matrix::Zero(x.size(), x.size());
  for (const auto& o : objs) h += o.hessian(x);
  return h;
}

std::vector<LabeledSample> gen_logistic_samples(std::size_t count, std::size_t dim,
                                                std::uint64_t seed, double flip_probability) {
  if (count == 0 || dim == 0) throw InvalidInput("gen_logistic_samples: counts must be positive");
  Rng rng = derive_stream(seed, 0x10u);
  std::normal_distribution<double> normal;
  Vector planted(dim);
  for (auto& v : planted) v = normal(rng);
  std::vector<LabeledSample> out(count);
  for (auto& s : out) {
    s.features.resize(dim);
    for (auto& v : s.features) v = normal(rng);
    double label = planted.dot(s.features) >= 0.0 ? 1.0 : -1.0;
    if (uniform01(rng) < flip_probability) label = -label;
    s.label = label;
  }
  return out;
}

std::vector<LocalObjective> gen_synthetic_logistic(const SyntheticLogisticOptions& opts,
                                                   std::uint64_t seed) {
  if (opts.agents == 0 || opts.samples_per_agent == 0 || opts.dim == 0)
    throw InvalidInput("gen_synthetic_logistic: counts must be positive");
  const auto samples = gen_logistic_samples(opts.agents * opts.samples_per_agent, opts.dim, seed,
                                            opts.flip_probability);
  std::vector<LocalObjective> objs;
  objs.reserve(opts.agents);
  for (std::size_t i = 0; i < opts.agents; ++i) {
    Matrix f(opts.samples_per_agent, opts.dim);
    Vector l(opts.samples_per_agent);
    for (std::size_t j = 0; j < opts.samples_per_agent; ++j) {
      const auto& s = samples[i * opts.samples_per_agent + j];
      f.row(static_cast<Eigen::Index>(j)) = s.features.transpose();
      l(static_cast<Eigen::Index>(j)) = s.label;
    }
    objs.push_back(LocalObjective::logistic(std::move(f), std::move(l), opts.lambda_reg));
  }
  return objs;
}

std::vector<LocalObjective> gen_synthetic_quadratic(std::size_t agents, std::size_t dim,
                                                    double eig_min, double eig_max,
                                                    std::uint64_t seed) {
  if (agents == 0 || dim == 0) throw InvalidInput("gen_synthetic_quadratic: counts must be positive");
  if (!(eig_min > 0.0 && eig_max >= eig_min))
    throw InvalidInput("gen_synthetic_quadratic: need 0 < eig_min <= eig_max");
  Rng rng = derive_stream(seed, 0x20u);
  std::normal_distribution<double> normal;
  std::vector<LocalObjective> objs;
  objs.reserve(agents);
  for (std::size_t i = 0; i < agents; ++i) {
    Matrix g(dim, dim);
    for (Eigen::Index c = 0; c < g.cols(); ++c)
      for (Eigen::Index r = 0; r < g.rows(); ++r) g(r, c) = normal(rng);
    const Matrix q = Eigen::HouseholderQR<Matrix>(g).householderQ();
    Vector eig(dim);
    for (auto& e : eig) e = eig_min + (eig_max - eig_min) * uniform01(rng);
    Matrix a = q * eig.asDiagonal() * q.transpose();
    a = 0.5 * (a + a.transpose()).eval();
    Vector b(dim);
    for (auto& v : b) v = normal(rng);
    objs.push_back(LocalObjective::quadratic(std::move(a), std::move(b)));
  }
  return objs;
}

std::vector<LabeledSample> load_csv(std::istream& in) {
  std::vector<LabeledSample> out;
  std::string line;
  std::size_t lineno = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto fail = [&](const std::string& what) {
      return InvalidInput("csv line " + std::to_string(lineno) + ": " + what);
    };
    std::vector<double> fields;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw fail("malformed number '" + cell + "'");
      }
      if (cell.find_first_not_of(" \t", used) != std::string::npos)
        throw fail("malformed number '" + cell + "'");
      if (!std::isfinite(v)) throw fail("non-finite value");
      fields.push_back(v);
    }
    if (!line.empty() && line.back() == ',') throw fail("empty trailing field");
    if (fields.size() < 2) throw fail("need a label and at least one feature");
    if (dim == 0) {
      dim = fields.size() - 1;
    } else if (fields.size() - 1 != dim) {
      throw fail("dimension " + std::to_string(fields.size() - 1) + " differs from " +
                 std::to_string(dim));
    }
    LabeledSample s;
    if (fields[0] == 1.0) {
      s.label = 1.0;
    } else if (fields[0] == -1.0 || fields[0] == 0.0) {
      s.label = -1.0;
    } else {
      throw fail("label must be one of -1, 0, 1");
    }
    s.features = Eigen::Map<const Vector>(fields.data() + 1, static_cast<Eigen::Index>(dim));
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<LabeledSample> load_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open csv file '" + path + "'");
  return load_csv(in);
}

void write_csv(std::ostream& out, const std::vector<LabeledSample>& samples) {
  const auto old = out.precision(17);
  for (const auto& s : samples) {
    out << (s.label > 0 ? "1" : "-1");
    for (double v : s.features) out << ',' << v;
    out << '\n';
  }
  out.precision(old);
}

std::vector<LocalObjective> partition_round_robin(const std::vector<LabeledSample>& samples,
                                                  std::size_t agents, double lambda_reg) {
  if (agents == 0) throw InvalidInput("partition: need at least one agent");
  if (samples.size() < agents)
    throw InvalidInput("partition: " + std::to_string(samples.size()) + " samples for " +
                       std::to_string(agents) + " agents leaves some agent empty");
  const auto dim = samples.front().features.size();
  std::vector<std::vector<const LabeledSample*>> buckets(agents);
  for (std::size_t s = 0; s < samples.size(); ++s) buckets[s % agents].push_back(&samples[s]);
  std::vector<LocalObjective> objs;
  objs.reserve(agents);
  for (const auto& bucket : buckets) {
    Matrix f(static_cast<Eigen::Index>(bucket.size()), dim);
    Vector l(static_cast<Eigen::Index>(bucket.size()));
    for (std::size_t j = 0; j < bucket.size(); ++j) {
      f.row(static_cast<Eigen::Index>(j)) = bucket[j]->features.transpose();
      l(static_cast<Eigen::Index>(j)) = bucket[j]->label;
    }
    objs.push_back(LocalObjective::logistic(std::move(f), std::move(l), lambda_reg));
  }
  return objs;
}

}  // namespace ccdqm
