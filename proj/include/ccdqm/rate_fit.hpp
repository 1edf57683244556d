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

#ifndef CCDQM_RATE_FIT_HPP_
#define CCDQM_RATE_FIT_HPP_

#include <cstddef>
#include <span>

namespace ccdqm {

struct RateFit {
  double sigmaHat = 0.0;  // exp(slope) of log err against k
  double slope = 0.0;
  double r2 = 0.0;
  std::size_t windowBegin = 0;  // [begin, end) indices into the series
  std::size_t windowEnd = 0;
};

/// Least-squares line through (k, log err_k) over the final window_fraction
/// of the series. A series containing a non-positive value is cut just before
/// its first such entry. Throws InvalidInput when fewer than two points remain.
RateFit fit_rate(std::span<const double> err, double window_fraction = 0.5);

}  // namespace ccdqm

#endif  // CCDQM_RATE_FIT_HPP_
