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

#include "ccdqm/centralized.hpp"
#include "ccdqm/run.hpp"
#include "ccdqm/simulator.hpp"
#include "oracles.hpp"

namespace ccdqm {
namespace {

RunConfig dqm_config(double c) {
  RunConfig rc;
  rc.c = c;
  rc.schedule = ThresholdSchedule::zero();
  rc.compressor = Compressor::identity();
  return rc;
}

Matrix rows_of(const Vector& v, std::size_t n) {
  return v.transpose().replicate(static_cast<Eigen::Index>(n), 1);
}

TEST(Schedule, GeometricValues) {
  const auto s = ThresholdSchedule::geometric(2.0, 0.5);
  EXPECT_EQ(s.at(0), 2.0);
  EXPECT_EQ(s.at(3), 0.25);
  EXPECT_EQ(ThresholdSchedule::zero().at(5), 0.0);
  EXPECT_THROW(ThresholdSchedule::geometric(0.0, 0.5), InvalidInput);
  EXPECT_THROW(ThresholdSchedule::geometric(1.0, 1.0), InvalidInput);
}

TEST(RunConfig, Validation) {
  RunConfig rc = dqm_config(0.0);
  EXPECT_THROW(rc.validate(), InvalidInput);
  rc.c = 1.0;
  rc.threads = 0;
  EXPECT_THROW(rc.validate(), InvalidInput);
}

TEST(VariantName, FromScheduleAndCompressor) {
  const auto g = ThresholdSchedule::geometric(1, 0.9);
  EXPECT_EQ(variant_name(ThresholdSchedule::zero(), Compressor::identity()), "DQM");
  EXPECT_EQ(variant_name(g, Compressor::identity()), "C-DQM");
  EXPECT_EQ(variant_name(ThresholdSchedule::zero(), Compressor::det_quant(2)), "Q-DQM");
  EXPECT_EQ(variant_name(g, Compressor::det_quant(2)), "CC-DQM");
}

TEST(Simulator, InitialState) {
  const auto objs = gen_synthetic_quadratic(3, 2, 1.0, 2.0, 1);
  Simulator sim(Graph::complete(3), objs, dqm_config(1.0));
  EXPECT_EQ(sim.stacked_y(), Matrix::Zero(3, 2));
  EXPECT_EQ(sim.stacked_phi(), Matrix::Zero(3, 2));
  EXPECT_EQ(sim.iteration(), 0u);
  EXPECT_EQ(sim.total_refreshes(), 3u);
  Simulator again(Graph::complete(3), objs, dqm_config(1.0));
  EXPECT_EQ(sim.stacked_x(), again.stacked_x());
  RunConfig other = dqm_config(1.0);
  other.seed = 2;
  EXPECT_NE(Simulator(Graph::complete(3), objs, other).stacked_x(), sim.stacked_x());
  const Matrix e0 = sim.stacked_y() - sim.stacked_x();
  EXPECT_EQ(e0, -sim.stacked_x());
}

TEST(Simulator, RejectsInadmissibleInputs) {
  const auto objs2 = gen_synthetic_quadratic(2, 2, 1.0, 2.0, 1);
  EXPECT_THROW(Simulator(Graph::path(2), objs2, dqm_config(1.0)), InvalidInput);
  const auto objs3 = gen_synthetic_quadratic(3, 2, 1.0, 2.0, 1);
  EXPECT_THROW(Simulator(Graph::complete(4), objs3, dqm_config(1.0)), InvalidInput);
  EXPECT_THROW(Simulator(Graph::complete(3), objs3, dqm_config(1.0), Matrix::Zero(3, 5)),
               InvalidInput);
}

TEST(Simulator, MatchesMatrixFormOracle) {
  for (const Graph& g : {Graph::complete(3), Graph::ring(5)}) {
    const auto objs = gen_synthetic_quadratic(g.size(), 3, 0.5, 4.0, 17);
    Simulator sim(g, objs, dqm_config(0.7));
    testing::MatrixDqmOracle oracle(g, objs, 0.7, sim.stacked_x());
    for (int k = 0; k < 60; ++k) {
      sim.iterate();
      oracle.step();
      ASSERT_LE((sim.stacked_x() - oracle.stacked_x()).cwiseAbs().maxCoeff(), 1e-10) << k;
      ASSERT_LE((sim.stacked_phi() - oracle.stacked_phi()).cwiseAbs().maxCoeff(), 1e-10) << k;
    }
  }
}

TEST(Simulator, MatchesOracleOnLogistic) {
  const Graph g = gen_admissible_graph(6, 0.6, 3);
  const auto objs = gen_synthetic_logistic({6, 5, 3, 0.1, 0.05}, 4);
  Simulator sim(g, objs, dqm_config(0.3));
  testing::MatrixDqmOracle oracle(g, objs, 0.3, sim.stacked_x());
  for (int k = 0; k < 40; ++k) {
    sim.iterate();
    oracle.step();
    ASSERT_LE((sim.stacked_x() - oracle.stacked_x()).cwiseAbs().maxCoeff(), 1e-10) << k;
  }
}

TEST(Simulator, ReducesToBaseMethodOnceStateTracksIterate) {
  const Graph g = Graph::ring(5);
  const auto objs = gen_synthetic_logistic({5, 4, 3, 0.1, 0.05}, 21);
  Simulator sim(g, objs, dqm_config(0.5));
  sim.iterate();  // y_0 = 0 differs from x_0; from here on y = x
  Matrix x = sim.stacked_x();
  Matrix phi = sim.stacked_phi();
  for (int k = 0; k < 20; ++k) {
    x = testing::dqm_reference_step(g, objs, 0.5, x, phi);
    sim.iterate();
    ASSERT_LE((sim.stacked_x() - x).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Simulator, FixedPointIsInvariant) {
  const Graph g = Graph::complete(3);
  const auto objs = gen_synthetic_quadratic(3, 4, 1.0, 3.0, 9);
  const Vector xs = centralized_solve(objs).x;
  Matrix phi(3, 4);
  for (int i = 0; i < 3; ++i) phi.row(i) = -objs[static_cast<std::size_t>(i)].gradient(xs).transpose();
  Simulator sim(g, objs, dqm_config(1.0));
  sim.set_state(rows_of(xs, 3), rows_of(xs, 3), phi);
  for (int k = 0; k < 20; ++k) {
    sim.iterate();
    EXPECT_LE((sim.stacked_x() - rows_of(xs, 3)).squaredNorm(), 1e-20);
  }
}

TEST(Simulator, DualSumStaysZero) {
  const Graph g = gen_admissible_graph(8, 0.4, 2);
  const auto objs = gen_synthetic_logistic({8, 5, 4, 0.1, 0.05}, 2);
  RunConfig rc = dqm_config(0.2);
  rc.schedule = ThresholdSchedule::geometric(1.0, 0.9);
  rc.compressor = Compressor::stoch_quant(2);
  Simulator sim(g, objs, rc);
  for (int k = 0; k < 100; ++k) {
    sim.iterate();
    ASSERT_LE(sim.stacked_phi().colwise().sum().cwiseAbs().maxCoeff(), 1e-10);
    ASSERT_TRUE(sim.neighbor_copies_consistent());
  }
}

TEST(Simulator, BitCountAllTriggering) {
  const auto objs = gen_synthetic_quadratic(3, 24, 1.0, 2.0, 5);
  RunConfig rc = dqm_config(1.0);
  rc.compressor = Compressor::det_quant(2);
  Simulator sim(Graph::complete(3), objs, rc);
  std::uint64_t per_link = 0, per_broadcast = 0, triggers = 0;
  const int K = 25;
  for (int k = 0; k < K; ++k) {
    const auto s = sim.iterate();
    per_link += s.comm.bitsPerLink;
    per_broadcast += s.comm.bitsPerBroadcast;
    triggers += s.comm.triggers;
  }
  EXPECT_EQ(triggers, 3u * K);
  EXPECT_EQ(per_link, static_cast<std::uint64_t>(K) * 3 * 2 * (32 + 2 * 24));
  EXPECT_EQ(per_broadcast, static_cast<std::uint64_t>(K) * 3 * (32 + 2 * 24));
}

TEST(Simulator, LargeThresholdFreezesCommunication) {
  const auto objs = gen_synthetic_quadratic(3, 2, 1.0, 2.0, 5);
  RunConfig rc = dqm_config(1.0);
  rc.schedule = ThresholdSchedule::geometric(1e6, 0.99);
  Simulator sim(Graph::complete(3), objs, rc);
  const auto s = sim.iterate();
  EXPECT_EQ(s.comm.triggers, 0u);
  EXPECT_EQ(s.comm.bitsPerLink, 0u);
  EXPECT_EQ(sim.stacked_y(), Matrix::Zero(3, 2));
  EXPECT_EQ(sim.total_refreshes(), 3u);
}

TEST(Simulator, ThresholdComparisonIsInclusive) {
  const auto objs = gen_synthetic_quadratic(3, 2, 1.0, 2.0, 5);
  RunConfig rc = dqm_config(1.0);
  rc.schedule = ThresholdSchedule::geometric(1.0, 0.5);
  Simulator sim(Graph::complete(3), objs, rc);
  std::vector<Vector> next(3, Vector::Zero(2));
  next[0] << 1.0, 0.0;     // norm exactly mu(0) = 1
  next[1] << 0.0, 0.999;   // below
  const auto out = sim.trigger_and_communicate(next);
  EXPECT_TRUE(out.triggered[0]);
  EXPECT_FALSE(out.triggered[1]);
  EXPECT_EQ(out.threshold, 1.0);
  EXPECT_EQ(sim.agents()[0].ySelf, next[0]);
  EXPECT_EQ(sim.agents()[1].ySelf, Vector::Zero(2));
}

TEST(Simulator, UntriggeredAgentsKeepErrorBelowThreshold) {
  const Graph g = gen_admissible_graph(8, 0.5, 6);
  const auto objs = gen_synthetic_logistic({8, 5, 4, 0.1, 0.05}, 6);
  RunConfig rc = dqm_config(0.2);
  rc.schedule = ThresholdSchedule::geometric(0.5, 0.9);
  rc.compressor = Compressor::det_quant(3);
  Simulator sim(g, objs, rc);
  std::size_t checked = 0;
  for (int k = 0; k < 80; ++k) {
    const auto s = sim.iterate();
    for (std::size_t i = 0; i < sim.agent_count(); ++i) {
      if (s.comm.triggered[i]) continue;
      const auto& a = sim.agents()[i];
      EXPECT_LT((a.x - a.ySelf).norm(), s.comm.threshold);
      ++checked;
    }
  }
  EXPECT_GT(checked, 0u);
}

TEST(Simulator, HessianCacheIsExactAndCountsRefreshes) {
  const Graph g = gen_admissible_graph(8, 0.5, 7);
  const auto objs = gen_synthetic_logistic({8, 6, 5, 0.1, 0.02}, 7);
  RunConfig cached = dqm_config(0.2);
  cached.schedule = ThresholdSchedule::geometric(1.0, 0.9);
  cached.compressor = Compressor::det_quant(3);
  RunConfig fresh = cached;
  fresh.hessianCache = false;
  Simulator a(g, objs, cached), b(g, objs, fresh);
  std::uint64_t triggers = 0;
  for (int k = 0; k < 120; ++k) {
    triggers += a.iterate().comm.triggers;
    b.iterate();
    ASSERT_EQ(a.stacked_x(), b.stacked_x()) << k;
    ASSERT_EQ(a.stacked_phi(), b.stacked_phi()) << k;
  }
  EXPECT_EQ(a.total_triggers(), triggers);
  EXPECT_EQ(a.total_refreshes(), triggers + g.size());
  EXPECT_LT(a.total_refreshes(), b.total_refreshes());
}

TEST(Simulator, DeterministicAcrossThreadCounts) {
  const Graph g = gen_admissible_graph(10, 0.4, 8);
  const auto objs = gen_synthetic_logistic({10, 5, 4, 0.1, 0.05}, 8);
  RunConfig one = dqm_config(0.3);
  one.schedule = ThresholdSchedule::geometric(1.0, 0.9);
  one.compressor = Compressor::stoch_quant(2);
  one.replica = 3;
  RunConfig four = one;
  four.threads = 4;
  Simulator a(g, objs, one), b(g, objs, four);
  for (int k = 0; k < 60; ++k) {
    a.iterate();
    b.iterate();
  }
  EXPECT_EQ(a.stacked_x(), b.stacked_x());
  EXPECT_EQ(a.stacked_y(), b.stacked_y());
  one.replica = 4;
  Simulator c(g, objs, one);
  for (int k = 0; k < 60; ++k) c.iterate();
  EXPECT_NE(a.stacked_y(), c.stacked_y());
}

TEST(Run, ConvergesAndSatisfiesOptimalityResiduals) {
  const Graph g = Graph::complete(3);
  const auto objs = gen_synthetic_quadratic(3, 3, 1.0, 3.0, 2);
  RunConfig rc = dqm_config(1.0);
  rc.maxIter = 400;
  rc.tol = 1e-24;
  Simulator sim(g, objs, rc);
  RunOptions opt;
  opt.xStar = centralized_solve(objs).x;
  const auto rec = run(sim, opt);
  ASSERT_TRUE(rec.reachedTol);
  EXPECT_LE(rec.last().err, 1e-24);
  EXPECT_LE(rec.last().dualResidual, 1e-9);
  EXPECT_LE(rec.last().consensusError, 1e-9);
  EXPECT_EQ(rec.rows.front().iter, 0u);
  EXPECT_DOUBLE_EQ(rec.rows.front().err, 1.0);
  EXPECT_EQ(rec.rows.size(), rec.last().iter + 1);
  for (std::size_t k = 1; k < rec.rows.size(); ++k) {
    EXPECT_GE(rec.rows[k].bitsCum, rec.rows[k - 1].bitsCum);
    EXPECT_GE(rec.rows[k].roundsCum, rec.rows[k - 1].roundsCum);
  }
}

TEST(Run, StopsAtMaxIterWithoutOptimum) {
  const auto objs = gen_synthetic_quadratic(3, 2, 1.0, 3.0, 2);
  RunConfig rc = dqm_config(1.0);
  rc.maxIter = 7;
  Simulator sim(Graph::complete(3), objs, rc);
  const auto rec = run(sim, {});
  EXPECT_EQ(rec.rows.size(), 8u);
  EXPECT_FALSE(rec.reachedTol);
  EXPECT_TRUE(std::isnan(rec.last().err));
}

TEST(Run, MetricsCsvRoundTripAndMean) {
  const auto objs = gen_synthetic_quadratic(3, 2, 1.0, 3.0, 2);
  RunConfig rc = dqm_config(1.0);
  rc.maxIter = 12;
  rc.compressor = Compressor::stoch_quant(2);
  RunOptions opt;
  opt.xStar = centralized_solve(objs).x;
  std::vector<RunRecord> reps;
  for (std::uint64_t r = 0; r < 3; ++r) {
    rc.replica = r;
    Simulator sim(Graph::complete(3), objs, rc);
    reps.push_back(run(sim, opt));
  }
  std::stringstream ss;
  write_metrics_csv(ss, reps[0]);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), kMetricsHeader);
  const auto back = read_metrics_csv(ss);
  ASSERT_EQ(back.rows.size(), reps[0].rows.size());
  for (std::size_t k = 0; k < back.rows.size(); ++k) {
    EXPECT_EQ(back.rows[k].err, reps[0].rows[k].err);
    EXPECT_EQ(back.rows[k].bitsCum, reps[0].rows[k].bitsCum);
  }
  const auto mean = mean_record(reps);
  for (std::size_t k = 0; k < mean.rows.size(); ++k) {
    const double expect = (reps[0].rows[k].err + reps[1].rows[k].err + reps[2].rows[k].err) / 3.0;
    EXPECT_NEAR(mean.rows[k].err, expect, 1e-15);
  }
}

}  // namespace
}  // namespace ccdqm
