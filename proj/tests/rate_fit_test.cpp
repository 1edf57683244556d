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
#include <vector>

#include "ccdqm/common.hpp"
#include "ccdqm/rate_fit.hpp"

namespace ccdqm {
namespace {

TEST(RateFit, ExactGeometric) {
  std::vector<double> err;
  for (int k = 0; k < 40; ++k) err.push_back(std::pow(0.5, k));
  const auto f = fit_rate(err);
  EXPECT_NEAR(f.sigmaHat, 0.5, 1e-12);
  EXPECT_NEAR(f.r2, 1.0, 1e-12);
  EXPECT_EQ(f.windowBegin, 20u);
  EXPECT_EQ(f.windowEnd, 40u);
}

TEST(RateFit, NoisySeriesHasImperfectFit) {
  std::vector<double> err;
  for (int k = 0; k < 60; ++k) err.push_back(std::pow(0.9, k) * (k % 3 == 0 ? 2.0 : 1.0));
  const auto f = fit_rate(err);
  EXPECT_LT(f.r2, 1.0);
  EXPECT_NEAR(f.sigmaHat, 0.9, 0.02);
}

TEST(RateFit, TruncatesAtFirstZero) {
  std::vector<double> err = {1, 0.5, 0.25, 0.125, 0.0625, 0.0, 1e-3, 1e-4};
  const auto f = fit_rate(err, 1.0);
  EXPECT_EQ(f.windowEnd, 5u);
  EXPECT_NEAR(f.sigmaHat, 0.5, 1e-12);
}

TEST(RateFit, TooShortThrows) {
  std::vector<double> err = {1.0, 0.0};
  EXPECT_THROW(fit_rate(err), InvalidInput);
  std::vector<double> bad = {1.0, 0.5, 0.25};
  EXPECT_THROW(fit_rate(bad, 0.0), InvalidInput);
}

}  // namespace
}  // namespace ccdqm
