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

#include "ccdqm/config.hpp"

namespace ccdqm {
namespace {

TEST(Config, DefaultsMatchDeskPreset) {
  const ExperimentConfig cfg;
  EXPECT_EQ(cfg.graphN, 20u);
  EXPECT_EQ(cfg.graphTau, 0.4);
  EXPECT_EQ(cfg.dataM, 10u);
  EXPECT_EQ(cfg.dataD, 24u);
  EXPECT_EQ(cfg.lambdaReg, 0.01);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, ParsesCommentsAndWhitespace) {
  const auto cfg = parse_config_text(
      "# header\n\n  algorithm.c = 0.5   # trailing\nalgorithm.beta=auto\nrun.replicas = 4\n"
      "algorithm.delta = 0.01\nalgorithm.hessian_cache = false\n");
  EXPECT_EQ(cfg.c, 0.5);
  EXPECT_FALSE(cfg.beta.has_value());
  EXPECT_EQ(cfg.replicas, 4u);
  ASSERT_TRUE(cfg.delta.has_value());
  EXPECT_EQ(*cfg.delta, 0.01);
  EXPECT_FALSE(cfg.hessianCache);
}

TEST(Config, RoundTripIsIdempotent) {
  ExperimentConfig cfg;
  cfg.set("algorithm.c", "0.1");
  cfg.set("algorithm.beta", "12.5");
  cfg.set("algorithm.r_weight", "0.3333333333333333");
  cfg.set("graph.path", "some/graph.txt");
  cfg.set("run.tol", "1e-7");
  const std::string once = serialize_config(cfg);
  const auto back = parse_config_text(once);
  EXPECT_EQ(serialize_config(back), once);
  for (const auto& key : ExperimentConfig::keys()) EXPECT_EQ(back.get(key), cfg.get(key)) << key;
  EXPECT_EQ(back.c, 0.1);
}

TEST(Config, SerializationListsEveryKey) {
  const std::string text = serialize_config(ExperimentConfig{});
  for (const auto& key : ExperimentConfig::keys())
    EXPECT_NE(text.find(key + " = "), std::string::npos) << key;
}

TEST(Config, UnknownKeyAndBadValuesRejected) {
  EXPECT_THROW(parse_config_text("algorithm.gamma = 1\n"), ConfigError);
  EXPECT_THROW(parse_config_text("algorithm.c = fast\n"), ConfigError);
  EXPECT_THROW(parse_config_text("graph.n = -3\n"), ConfigError);
  EXPECT_THROW(parse_config_text("algorithm.schedule = linear\n"), ConfigError);
  EXPECT_THROW(parse_config_text("run.lyapunov = yes\n"), ConfigError);
  EXPECT_THROW(parse_config_text("just some words\n"), ConfigError);
}

TEST(Config, ErrorsNameTheLine) {
  try {
    parse_config_text("algorithm.c = 1\n\nalgorithm.rho = x\n");
    FAIL();
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("line 3"), std::string::npos) << what;
    EXPECT_NE(what.find("algorithm.rho"), std::string::npos) << what;
  }
}

TEST(Config, ValidationRanges) {
  auto bad = [](const std::string& key, const std::string& value) {
    ExperimentConfig cfg;
    cfg.set(key, value);
    EXPECT_THROW(cfg.validate(), ConfigError) << key << '=' << value;
  };
  bad("graph.n", "1");
  bad("graph.tau", "0");
  bad("algorithm.c", "0");
  bad("algorithm.rho", "1");
  bad("algorithm.alpha", "0");
  bad("algorithm.bits", "0");
  bad("algorithm.delta", "1");
  bad("run.replicas", "0");
  bad("graph.source", "file");
  bad("data.source", "csv");
}

TEST(Config, MissingFileIsConfigError) {
  EXPECT_THROW(load_config_file("/nonexistent/x.conf"), ConfigError);
}

TEST(Config, BuildsRunConfig) {
  ExperimentConfig cfg;
  cfg.set("algorithm.schedule", "zero");
  cfg.set("algorithm.compressor", "stoch_quant");
  cfg.set("algorithm.bits", "3");
  cfg.set("algorithm.bit_accounting", "per_broadcast");
  const RunConfig rc = cfg.make_run_config();
  EXPECT_TRUE(rc.schedule.is_zero());
  EXPECT_EQ(rc.compressor, Compressor::stoch_quant(3));
  EXPECT_EQ(rc.accounting, BitAccounting::PerBroadcast);
  cfg.set("algorithm.compressor", "top_k");
  cfg.set("algorithm.top_k", "4");
  EXPECT_EQ(cfg.make_compressor(), Compressor::top_k(4));
}

}  // namespace
}  // namespace ccdqm
