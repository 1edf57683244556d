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

#include "ccdqm/rate_fit.hpp"

#include <cmath>

#include "ccdqm/common.hpp"

namespace ccdqm {

RateFit fit_rate(std::span<const double> err, double window_fraction) {
  if (!(window_fraction > 0.0 && window_fraction <= 1.0))
    throw InvalidInput("fit_rate: window fraction must lie in (0, 1]");
  std::size_t usable = err.size();
  for (std::size_t k = 0; k < err.size(); ++k)
    if (!(err[k] > 0.0)) {
      usable = k;
      break;
    }
  const auto window = static_cast<std::size_t>(
      std::ceil(window_fraction * static_cast<double>(usable)));
  if (window < 2) throw InvalidInput("fit_rate: fewer than two usable points");
  RateFit fit;
  fit.windowEnd = usable;
  fit.windowBegin = usable - window;

  double sx = 0, sy = 0;
  for (std::size_t k = fit.windowBegin; k < fit.windowEnd; ++k) {
    sx += static_cast<double>(k);
    sy += std::log(err[k]);
  }
  const double n = static_cast<double>(window);
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = fit.windowBegin; k < fit.windowEnd; ++k) {
    const double dx = static_cast<double>(k) - mx;
    const double dy = std::log(err[k]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  fit.slope = sxy / sxx;
  fit.sigmaHat = std::exp(fit.slope);
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace ccdqm
