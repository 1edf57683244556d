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

#ifndef CCDQM_OBJECTIVE_HPP_
#define CCDQM_OBJECTIVE_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ccdqm/common.hpp"

namespace ccdqm {

struct Evaluation {
  double value = 0.0;
  Vector grad;
  Matrix hess;
};

struct ConvexityConstants {
  double v = 0.0;    // strong convexity modulus
  double ell = 0.0;  // gradient Lipschitz constant
};

/// Aggregate constants over all agents: v = min v_i, ell = max ell_i.
ConvexityConstants aggregate(const std::vector<ConvexityConstants>& per_agent);

/// A local objective f_i held by one agent. Either a quadratic
/// f(x) = 0.5 x^T A x - b^T x with A symmetric positive definite, or a
/// regularized logistic loss
/// f(x) = (1/m) sum_j log(1 + exp(-b_j a_j^T x)) + (lambda_reg / 2) |x|^2.
class LocalObjective {
 public:
  enum class Kind { Quadratic, Logistic };

  static LocalObjective quadratic(Matrix A, Vector b);
  /// features: m x d, one sample per row. labels in {-1, +1}.
  static LocalObjective logistic(Matrix features, Vector labels, double lambda_reg);

  Kind kind() const { return kind_; }
  std::size_t dimension() const { return dim_; }
  std::size_t samples() const { return static_cast<std::size_t>(features_.rows()); }
  double lambda_reg() const { return lambda_reg_; }

  const Matrix& A() const { return A_; }
  const Vector& b() const { return b_; }
  const Matrix& features() const { return features_; }
  const Vector& labels() const { return labels_; }

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  Matrix hessian(const Vector& x) const;
  Evaluation value_grad_hess(const Vector& x) const;

  /// Throws InvalidInput("not strongly convex") for an unregularized logistic loss.
  ConvexityConstants convexity_constants() const;

 private:
  LocalObjective() = default;
  void check_dim(const Vector& x) const;

  Kind kind_ = Kind::Quadratic;
  std::size_t dim_ = 0;
  Matrix A_;
  Vector b_;
  Matrix features_;
  Vector labels_;
  double lambda_reg_ = 0.0;
};

/// f(x) = sum_i f_i(x) on a common x.
double total_value(const std::vector<LocalObjective>& objs, const Vector& x);
Vector total_gradient(const std::vector<LocalObjective>& objs, const Vector& x);
Matrix total_hessian(const std::vector<LocalObjective>& objs, const Vector& x);

struct LabeledSample {
  double label = 0.0;
  Vector features;
};

struct SyntheticLogisticOptions {
  std::size_t agents = 0;
  std::size_t samples_per_agent = 0;
  std::size_t dim = 0;
  double flip_probability = 0.1;
  double lambda_reg = 0.01;
};

/// Standard-normal features, labels sign(xbar^T a) with a planted standard
/// normal xbar, each label flipped with probability flip_probability.
std::vector<LabeledSample> gen_logistic_samples(std::size_t count, std::size_t dim,
                                                std::uint64_t seed,
                                                double flip_probability = 0.1);
std::vector<LocalObjective> gen_synthetic_logistic(const SyntheticLogisticOptions& opts,
                                                   std::uint64_t seed);

/// Random quadratics with Hessian spectrum drawn uniformly in [eig_min, eig_max]
/// and standard-normal linear terms.
std::vector<LocalObjective> gen_synthetic_quadratic(std::size_t agents, std::size_t dim,
                                                    double eig_min, double eig_max,
                                                    std::uint64_t seed);

/// Rows "label,f1,...,fd". Labels 0 and -1 map to -1, 1 maps to +1.
std::vector<LabeledSample> load_csv(std::istream& in);
std::vector<LabeledSample> load_csv_file(const std::string& path);
void write_csv(std::ostream& out, const std::vector<LabeledSample>& samples);

/// Deals samples to agents round-robin: sample s goes to agent s mod n.
std::vector<LocalObjective> partition_round_robin(const std::vector<LabeledSample>& samples,
                                                  std::size_t agents, double lambda_reg);

}  // namespace ccdqm

#endif  // CCDQM_OBJECTIVE_HPP_
