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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ccdqm/centralized.hpp"
#include "ccdqm/objective.hpp"

namespace ccdqm {
namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Vector central_difference_grad(const LocalObjective& f, const Vector& x, double h) {
  Vector g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Vector p = x, m = x;
    p(j) += h;
    m(j) -= h;
    g(j) = (f.value(p) - f.value(m)) / (2.0 * h);
  }
  return g;
}

TEST(Quadratic, ValueGradientHessian) {
  const auto f = LocalObjective::quadratic(Matrix::Identity(2, 2), Vector::Zero(2));
  const auto e = f.value_grad_hess(vec({1, 2}));
  EXPECT_DOUBLE_EQ(e.value, 2.5);
  EXPECT_TRUE(e.grad.isApprox(vec({1, 2})));
  EXPECT_TRUE(e.hess.isApprox(Matrix::Identity(2, 2)));
}

TEST(Quadratic, ConstantsFromSpectrum) {
  const auto f = LocalObjective::quadratic(vec({1, 4}).asDiagonal(), Vector::Zero(2));
  const auto k = f.convexity_constants();
  EXPECT_NEAR(k.v, 1.0, 1e-12);
  EXPECT_NEAR(k.ell, 4.0, 1e-12);
}

TEST(Quadratic, RejectsIndefiniteOrAsymmetric) {
  Matrix a(2, 2);
  a << 1, 0, 0, -1;
  EXPECT_THROW(LocalObjective::quadratic(a, Vector::Zero(2)), InvalidInput);
  a << 1, 0.5, 0, 1;
  EXPECT_THROW(LocalObjective::quadratic(a, Vector::Zero(2)), InvalidInput);
  EXPECT_THROW(LocalObjective::quadratic(Matrix::Identity(2, 2), Vector::Zero(3)), InvalidInput);
}

TEST(Logistic, SingleSampleAtOrigin) {
  Matrix a(1, 1);
  a << 1.0;
  const auto f = LocalObjective::logistic(a, vec({1}), 0.0);
  const auto e = f.value_grad_hess(vec({0}));
  EXPECT_NEAR(e.value, std::log(2.0), 1e-15);
  EXPECT_NEAR(e.grad(0), -0.5, 1e-15);
  EXPECT_NEAR(e.hess(0, 0), 0.25, 1e-15);
}

TEST(Logistic, ConstantsUseQuarterCurvatureBound) {
  Matrix a(1, 1);
  a << 2.0;
  const auto k = LocalObjective::logistic(a, vec({1}), 0.1).convexity_constants();
  EXPECT_NEAR(k.v, 0.1, 1e-15);
  EXPECT_NEAR(k.ell, 1.1, 1e-12);
}

TEST(Logistic, UnregularizedIsNotStronglyConvex) {
  Matrix a(1, 1);
  a << 1.0;
  const auto f = LocalObjective::logistic(a, vec({1}), 0.0);
  try {
    f.convexity_constants();
    FAIL() << "expected InvalidInput";
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("not strongly convex"), std::string::npos);
  }
}

TEST(Logistic, RejectsBadLabelsAndShapes) {
  Matrix a = Matrix::Ones(2, 2);
  EXPECT_THROW(LocalObjective::logistic(a, vec({1, 0}), 0.1), InvalidInput);
  EXPECT_THROW(LocalObjective::logistic(a, vec({1}), 0.1), InvalidInput);
  EXPECT_THROW(LocalObjective::logistic(Matrix(0, 2), Vector(0), 0.1), InvalidInput);
  EXPECT_THROW(LocalObjective::logistic(a, vec({1, -1}), -1.0), InvalidInput);
}

TEST(Logistic, StableForLargeMargins) {
  Matrix a(2, 1);
  a << 1.0, -1.0;
  const auto f = LocalObjective::logistic(a, vec({1, 1}), 0.0);
  const auto e = f.value_grad_hess(vec({800}));
  EXPECT_TRUE(std::isfinite(e.value));
  EXPECT_NEAR(e.value, 400.0, 1e-9);
  EXPECT_TRUE(e.grad.allFinite());
  EXPECT_TRUE(e.hess.allFinite());
}

TEST(Objective, DimensionMismatchThrows) {
  const auto f = LocalObjective::quadratic(Matrix::Identity(2, 2), Vector::Zero(2));
  EXPECT_THROW(f.value(vec({1, 2, 3})), InvalidInput);
  EXPECT_THROW(f.gradient(vec({1})), InvalidInput);
}

TEST(Objective, FiniteDifferenceGradientsAndHessians) {
  auto logistic = gen_synthetic_logistic({3, 6, 5, 0.1, 0.05}, 11);
  auto quad = gen_synthetic_quadratic(3, 5, 0.5, 3.0, 12);
  std::vector<LocalObjective> all = logistic;
  all.insert(all.end(), quad.begin(), quad.end());
  Rng rng(77);
  std::normal_distribution<double> nd;
  for (const auto& f : all) {
    for (int t = 0; t < 5; ++t) {
      Vector x(5), v(5);
      for (auto& c : x) c = nd(rng);
      for (auto& c : v) c = nd(rng);
      const Vector g = f.gradient(x);
      const Vector fd = central_difference_grad(f, x, 1e-5);
      EXPECT_LE((g - fd).norm(), 1e-5 * std::max(1.0, g.norm()));
      const double h = 1e-5;
      const Vector hv_fd = (f.gradient(x + h * v) - f.gradient(x - h * v)) / (2.0 * h);
      const Vector hv = f.hessian(x) * v;
      EXPECT_LE((hv - hv_fd).norm(), 1e-4 * std::max(1.0, hv.norm()));
    }
  }
}

TEST(Synthetic, ShapesLabelsAndDeterminism) {
  const auto objs = gen_synthetic_logistic({2, 3, 2, 0.1, 0.01}, 5);
  ASSERT_EQ(objs.size(), 2u);
  for (const auto& f : objs) {
    EXPECT_EQ(f.samples(), 3u);
    EXPECT_EQ(f.dimension(), 2u);
    for (Eigen::Index j = 0; j < f.labels().size(); ++j)
      EXPECT_TRUE(f.labels()(j) == 1.0 || f.labels()(j) == -1.0);
  }
  const auto again = gen_synthetic_logistic({2, 3, 2, 0.1, 0.01}, 5);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(objs[i].features(), again[i].features());
    EXPECT_EQ(objs[i].labels(), again[i].labels());
  }
}

TEST(Synthetic, FlipRateMatchesRequestedProbability) {
  const auto clean = gen_logistic_samples(20000, 4, 9, 0.0);
  const auto noisy = gen_logistic_samples(20000, 4, 9, 0.1);
  std::size_t flipped = 0;
  for (std::size_t s = 0; s < clean.size(); ++s) flipped += clean[s].label != noisy[s].label;
  const double rate = static_cast<double>(flipped) / 20000.0;
  EXPECT_NEAR(rate, 0.1, 3.0 * std::sqrt(0.09 / 20000.0));
}

TEST(Csv, ParsesAndCoercesLabels) {
  std::istringstream in("1,0.5,0.2\n-1,0.1,0.9\n0,1,1\n");
  const auto s = load_csv(in);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].features.size(), 2);
  EXPECT_EQ(s[0].label, 1.0);
  EXPECT_EQ(s[1].label, -1.0);
  EXPECT_EQ(s[2].label, -1.0);
}

TEST(Csv, DimensionErrorNamesLine) {
  std::istringstream in("1,0.5,0.2\n-1,0.1,0.9,3\n");
  try {
    load_csv(in);
    FAIL() << "expected InvalidInput";
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(Csv, RejectsBadLabelsAndCells) {
  std::istringstream label("2,1,1\n");
  EXPECT_THROW(load_csv(label), InvalidInput);
  std::istringstream cell("1,abc\n");
  EXPECT_THROW(load_csv(cell), InvalidInput);
}

TEST(Csv, WriteThenReadRoundTrip) {
  const auto s = gen_logistic_samples(7, 3, 2);
  std::stringstream ss;
  write_csv(ss, s);
  const auto back = load_csv(ss);
  ASSERT_EQ(back.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(back[i].label, s[i].label);
    EXPECT_EQ(back[i].features, s[i].features);
  }
}

TEST(Partition, RoundRobin) {
  const auto s = gen_logistic_samples(7, 3, 2);
  const auto objs = partition_round_robin(s, 3, 0.1);
  ASSERT_EQ(objs.size(), 3u);
  EXPECT_EQ(objs[0].samples(), 3u);
  EXPECT_EQ(objs[1].samples(), 2u);
  EXPECT_EQ(objs[0].features().row(1), s[3].features.transpose());
  EXPECT_THROW(partition_round_robin(s, 8, 0.1), InvalidInput);
}

TEST(Centralized, QuadraticMeanInOneStep) {
  std::vector<LocalObjective> objs;
  const double a[3] = {1.0, 4.0, -2.0};
  for (double ai : a) objs.push_back(LocalObjective::quadratic(Matrix::Identity(1, 1), vec({ai})));
  const auto sol = centralized_solve(objs);
  EXPECT_NEAR(sol.x(0), 1.0, 1e-14);
  EXPECT_LE(sol.iterations, 2u);
}

TEST(Centralized, LogisticGradientCertificate) {
  const auto objs = gen_synthetic_logistic({5, 10, 6, 0.1, 0.01}, 3);
  const auto sol = centralized_solve(objs);
  EXPECT_LE(total_gradient(objs, sol.x).norm(), 1e-12);
  EXPECT_TRUE(sol.stronglyConvex);
}

TEST(Centralized, UnregularizedLogisticWarns) {
  const auto objs = gen_synthetic_logistic({4, 10, 3, 0.2, 0.0}, 8);
  const auto sol = centralized_solve(objs, 1e-10);
  EXPECT_FALSE(sol.stronglyConvex);
  EXPECT_FALSE(sol.warning.empty());
}

}  // namespace
}  // namespace ccdqm
