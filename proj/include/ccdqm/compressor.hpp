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

#ifndef CCDQM_COMPRESSOR_HPP_
#define CCDQM_COMPRESSOR_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "ccdqm/common.hpp"

namespace ccdqm {

/// Vector compressor used on the innovation x_{i,k+1} - y_{i,k}.
///
/// detQuant rounds every coordinate onto 2^b uniform levels spanning
/// [-|x|_inf, |x|_inf]; stochQuant rounds |x_i| stochastically onto
/// 2^(b-1)+1 levels of [0, |x|_inf] and keeps the sign, which makes it
/// unbiased; topK keeps the k largest-magnitude coordinates (an extension
/// beyond the two quantizers). Payloads travel as exact reconstructions;
/// only the encoded size is simulated.
class Compressor {
 public:
  enum class Kind { Identity, DetQuant, StochQuant, TopK };

  static Compressor identity();
  static Compressor det_quant(int bits);
  static Compressor stoch_quant(int bits);
  static Compressor top_k(std::size_t k);

  Kind kind() const { return kind_; }
  int bits() const { return bits_; }
  std::size_t k() const { return k_; }
  bool unbiased() const { return kind_ == Kind::StochQuant; }
  bool stochastic() const { return kind_ == Kind::StochQuant; }

  /// Analytic contraction bound for vectors of dimension d; empty when the
  /// bound is not below 1 or not known.
  std::optional<double> delta_bound(std::size_t d) const;

  /// Encoded size in bits of one message of dimension d.
  std::uint64_t message_bits(std::size_t d) const;

  /// Config spelling: identity | det_quant | stoch_quant | top_k.
  std::string name() const;
  std::string describe() const;

  friend bool operator==(const Compressor&, const Compressor&) = default;

 private:
  Kind kind_ = Kind::Identity;
  int bits_ = 0;
  std::size_t k_ = 0;
};

Compressor::Kind parse_compressor_kind(const std::string& name);

struct CompressedMessage {
  Vector payload;
  std::uint64_t bits = 0;
};

/// rng is consumed only by stochQuant. Throws InvalidInput on non-finite
/// input or (topK) k larger than the dimension. C(0) = 0.
CompressedMessage compress(const Compressor& c, const Vector& x, Rng& rng);

using VectorSampler = std::function<Vector(Rng&)>;

struct DeltaEstimate {
  double maxRatio = 0.0;
  double meanRatio = 0.0;
  /// 3-sigma half-width of the Monte-Carlo mean at the maximizing sample
  /// (zero for deterministic compressors).
  double halfWidth = 0.0;
  std::size_t samplesUsed = 0;
  std::size_t zeroSkipped = 0;
};

/// Estimates max over sampled x of E|x - C(x)|^2 / |x|^2. Stochastic
/// compressors average inner_draws draws per sample. trials >= 100.
DeltaEstimate empirical_delta(const Compressor& c, const VectorSampler& sampler,
                              std::size_t trials, Rng& rng, std::size_t inner_draws = 100);

struct BiasEstimate {
  Vector bias;         // mean of C(x) - x
  double biasNorm = 0.0;
  double bandNorm = 0.0;  // norm of the per-coordinate band
  bool withinBand = false;
};

/// trials >= 1000. withinBand requires every coordinate of the bias to be
/// inside a Bonferroni-corrected 3-sigma band (exact zero when the output
/// has no variance).
BiasEstimate check_unbiased(const Compressor& c, const Vector& x, std::size_t trials, Rng& rng);

}  // namespace ccdqm

#endif  // CCDQM_COMPRESSOR_HPP_
