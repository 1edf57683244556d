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

#include "ccdqm/compressor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace ccdqm {
namespace {

constexpr int kMaxBits = 52;
constexpr std::uint64_t kScalarBits = 32;

std::uint64_t ceil_log2(std::size_t d) {
  std::uint64_t bits = 0;
  while ((std::size_t{1} << bits) < d) ++bits;
  return bits;
}

Vector det_quant(const Vector& x, int bits) {
  const double m = x.lpNorm<Eigen::Infinity>();
  if (m == 0.0) return Vector::Zero(x.size());
  const double levels = std::ldexp(1.0, bits) - 1.0;  // 2^b - 1
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    // (x_i + m) / tau with tau = 2m / (2^b - 1), then round half up.
    const double t = (x(i) + m) / (2.0 * m);
    const double q = std::clamp(std::floor(t * levels + 0.5), 0.0, levels);
    out(i) = m * ((2.0 * q - levels) / levels);
  }
  return out;
}

Vector stoch_quant(const Vector& x, int bits, Rng& rng) {
  const double m = x.lpNorm<Eigen::Infinity>();
  Vector out = Vector::Zero(x.size());
  if (m == 0.0) return out;
  const double half_levels = std::ldexp(1.0, bits - 1);  // 2^(b-1)
  const double step = m / half_levels;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double u = uniform01(rng);
    const double level = std::floor(half_levels * std::abs(x(i)) / m + u);
    const double sign = x(i) > 0 ? 1.0 : (x(i) < 0 ? -1.0 : 0.0);
    out(i) = sign * step * level;
  }
  return out;
}

Vector top_k(const Vector& x, std::size_t k) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(x.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return std::abs(x(a)) > std::abs(x(b)); });
  Vector out = Vector::Zero(x.size());
  for (std::size_t j = 0; j < k; ++j) out(idx[j]) = x(idx[j]);
  return out;
}

}  // namespace

Compressor Compressor::identity() { return Compressor{}; }

Compressor Compressor::det_quant(int bits) {
  if (bits < 1 || bits > kMaxBits)
    throw InvalidInput("det_quant: bits must lie in [1, 52], got " + std::to_string(bits));
  Compressor c;
  c.kind_ = Kind::DetQuant;
  c.bits_ = bits;
  return c;
}

Compressor Compressor::stoch_quant(int bits) {
  if (bits < 1 || bits > kMaxBits)
    throw InvalidInput("stoch_quant: bits must lie in [1, 52], got " + std::to_string(bits));
  Compressor c;
  c.kind_ = Kind::StochQuant;
  c.bits_ = bits;
  return c;
}

Compressor Compressor::top_k(std::size_t k) {
  if (k < 1) throw InvalidInput("top_k: k must be >= 1");
  Compressor c;
  c.kind_ = Kind::TopK;
  c.k_ = k;
  return c;
}

std::optional<double> Compressor::delta_bound(std::size_t d) const {
  const double dd = static_cast<double>(d);
  double bound = 0.0;
  switch (kind_) {
    case Kind::Identity:
      return 0.0;
    case Kind::DetQuant: {
      const double levels = std::ldexp(1.0, bits_) - 1.0;
      bound = dd / (levels * levels);
      break;
    }
    case Kind::StochQuant:
      // Per-coordinate variance is at most (|x|_inf 2^-(b-1))^2 / 4.
      bound = dd / std::ldexp(1.0, 2 * bits_);
      break;
    case Kind::TopK:
      if (k_ > d) return std::nullopt;
      bound = 1.0 - static_cast<double>(k_) / dd;
      break;
  }
  if (bound < 1.0) return bound;
  return std::nullopt;
}

std::uint64_t Compressor::message_bits(std::size_t d) const {
  const std::uint64_t dd = d;
  switch (kind_) {
    case Kind::Identity:
      return kScalarBits * dd;
    case Kind::DetQuant:
      return kScalarBits + static_cast<std::uint64_t>(bits_) * dd;
    case Kind::StochQuant:
      return kScalarBits + static_cast<std::uint64_t>(bits_ + 1) * dd;
    case Kind::TopK:
      return (kScalarBits + ceil_log2(d)) * k_;
  }
  return 0;
}

std::string Compressor::name() const {
  switch (kind_) {
    case Kind::Identity:
      return "identity";
    case Kind::DetQuant:
      return "det_quant";
    case Kind::StochQuant:
      return "stoch_quant";
    case Kind::TopK:
      return "top_k";
  }
  return "?";
}

std::string Compressor::describe() const {
  switch (kind_) {
    case Kind::DetQuant:
    case Kind::StochQuant:
      return name() + "(b=" + std::to_string(bits_) + ")";
    case Kind::TopK:
      return name() + "(k=" + std::to_string(k_) + ")";
    default:
      return name();
  }
}

Compressor::Kind parse_compressor_kind(const std::string& name) {
  if (name == "identity") return Compressor::Kind::Identity;
  if (name == "det_quant") return Compressor::Kind::DetQuant;
  if (name == "stoch_quant") return Compressor::Kind::StochQuant;
  if (name == "top_k") return Compressor::Kind::TopK;
  throw InvalidInput("unknown compressor '" + name +
                     "' (expected identity|det_quant|stoch_quant|top_k)");
}

CompressedMessage compress(const Compressor& c, const Vector& x, Rng& rng) {
  if (!x.allFinite()) throw InvalidInput("compress: non-finite input");
  const auto d = static_cast<std::size_t>(x.size());
  CompressedMessage msg;
  msg.bits = c.message_bits(d);
  switch (c.kind()) {
    case Compressor::Kind::Identity:
      msg.payload = x;
      break;
    case Compressor::Kind::DetQuant:
      msg.payload = det_quant(x, c.bits());
      break;
    case Compressor::Kind::StochQuant:
      msg.payload = stoch_quant(x, c.bits(), rng);
      break;
    case Compressor::Kind::TopK:
      if (c.k() > d)
        throw InvalidInput("top_k: k = " + std::to_string(c.k()) + " exceeds dimension " +
                           std::to_string(d));
      msg.payload = top_k(x, c.k());
      break;
  }
  return msg;
}

DeltaEstimate empirical_delta(const Compressor& c, const VectorSampler& sampler,
                              std::size_t trials, Rng& rng, std::size_t inner_draws) {
  if (trials < 100) throw InvalidInput("empirical_delta: trials must be >= 100");
  const std::size_t draws = c.stochastic() ? std::max<std::size_t>(inner_draws, 2) : 1;
  DeltaEstimate est;
  double ratio_sum = 0.0;
  bool first = true;
  for (std::size_t t = 0; t < trials; ++t) {
    const Vector x = sampler(rng);
    const double norm2 = x.squaredNorm();
    if (norm2 == 0.0) {
      ++est.zeroSkipped;
      continue;
    }
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t r = 0; r < draws; ++r) {
      const double e = (x - compress(c, x, rng).payload).squaredNorm() / norm2;
      sum += e;
      sum2 += e * e;
    }
    const double mean = sum / static_cast<double>(draws);
    double half = 0.0;
    if (draws > 1) {
      const double var = std::max(0.0, (sum2 - sum * mean) / static_cast<double>(draws - 1));
      half = 3.0 * std::sqrt(var / static_cast<double>(draws));
    }
    if (first || mean > est.maxRatio) {
      est.maxRatio = mean;
      est.halfWidth = half;
      first = false;
    }
    ratio_sum += mean;
    ++est.samplesUsed;
  }
  if (est.samplesUsed > 0) est.meanRatio = ratio_sum / static_cast<double>(est.samplesUsed);
  return est;
}

BiasEstimate check_unbiased(const Compressor& c, const Vector& x, std::size_t trials, Rng& rng) {
  if (trials < 1000) throw InvalidInput("check_unbiased: trials must be >= 1000");
  const Eigen::Index d = x.size();
  Vector sum = Vector::Zero(d);
  Vector sum2 = Vector::Zero(d);
  for (std::size_t t = 0; t < trials; ++t) {
    const Vector e = compress(c, x, rng).payload - x;
    sum += e;
    sum2 += e.cwiseAbs2();
  }
  const double n = static_cast<double>(trials);
  BiasEstimate out;
  out.bias = sum / n;
  const Vector var = ((sum2 - sum.cwiseProduct(out.bias)) / (n - 1.0)).cwiseMax(0.0);
  // Summation round-off allowance for coordinates without variance.
  const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() *
                          std::max(1.0, x.lpNorm<Eigen::Infinity>());
  // Bonferroni-corrected 3-sigma level.
  const double tail = std::erfc(3.0 / std::sqrt(2.0)) / static_cast<double>(std::max<Eigen::Index>(d, 1));
  double lo = 3.0, hi = 40.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (std::erfc(mid / std::sqrt(2.0)) > tail ? lo : hi) = mid;
  }
  const Vector band = hi * (var / n).cwiseSqrt();
  out.withinBand = true;
  for (Eigen::Index i = 0; i < d; ++i)
    if (std::abs(out.bias(i)) > band(i) + roundoff) out.withinBand = false;
  out.biasNorm = out.bias.norm();
  out.bandNorm = band.norm();
  return out;
}

}  // namespace ccdqm
