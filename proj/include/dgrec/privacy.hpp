// Copyright 2026 The DGREC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DGREC_PRIVACY_HPP_
#define DGREC_PRIVACY_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dgrec/graph.hpp"
#include "dgrec/rng.hpp"

namespace dgrec {

// The published privacy numbers depend on an unstated logarithm
// convention; both are exposed and natural log is the default.
enum class LogBase { kNatural, kBase10 };

double log_in_base(double x, LogBase base);

// Secure gradient-sharing parameters: clip radius and perturbation
// strength. Both must be positive.
struct LdpConfig {
  double clip = 0.1;  // delta
  double beta = 1.0;

  void validate() const;

  // Probability that a coordinate with (already clipped) value g encodes
  // to +1.
  double positive_probability(double g) const;

  // Scale applied to the mean of received codes when decoding:
  // clip * (e^beta + 1) / (e^beta - 1).
  double decode_scale() const;
};

// One-bit encoded flat gradient tagged with its origin and round.
struct EncodedGradient {
  std::vector<std::int8_t> bits;  // every entry is -1 or +1
  UserId origin = 0;
  std::int32_t round = 0;

  std::size_t size() const { return bits.size(); }

  // Wire format: origin (8 bytes) | round (4 bytes) | n_s (4 bytes),
  // little-endian, followed by ceil(n_s/8) payload bytes. Bit 1 maps to
  // +1, packed LSB-first within each byte.
  std::vector<std::uint8_t> serialize() const;
  static EncodedGradient deserialize(std::span<const std::uint8_t> buf);
  std::size_t wire_bytes() const { return 16 + (bits.size() + 7) / 8; }
  std::uint64_t payload_bits() const { return bits.size(); }
};

// Elementwise clamp to [-delta, delta].
Eigen::VectorXd clip(const Eigen::VectorXd& g, double delta);

// Clips internally, then samples each bit from the Bernoulli encoding
// distribution.
EncodedGradient encode(const Eigen::VectorXd& g, const LdpConfig& cfg,
                       Rng& rng, UserId origin = 0, std::int32_t round = 0);

// Unbiased estimate of the mean clipped gradient across the collection.
// All encodings must share one length and have distinct origins.
Eigen::VectorXd decode(std::span<const EncodedGradient> encodings,
                       const LdpConfig& cfg);

// Closed-form per-round budget of the encoder at Renyi order 1.5, for a
// gradient of n_s coordinates.
double rdp_epsilon(std::int64_t n_s, double delta, double beta,
                   LogBase base = LogBase::kNatural);

// Converts T rounds of (1.5, eps)-RDP into (eps', gamma)-DP via sequential
// composition: eps' = eps * T + 2 * log(1/gamma).
double compose_to_dp(double per_round_epsilon, std::int64_t rounds,
                     double gamma, LogBase base = LogBase::kNatural);

// Exact order-1.5 Renyi divergence between the encodings of two scalar
// inputs (each a two-point distribution on {-1, +1}).
double two_point_renyi_divergence(const LdpConfig& cfg, double g_a,
                                  double g_b,
                                  LogBase base = LogBase::kNatural);

// Monte-Carlo estimate of the same divergence from `samples` draws of the
// encoder on g_a. Exactly zero when g_a == g_b.
double empirical_renyi_divergence(const LdpConfig& cfg, double g_a,
                                  double g_b, std::int64_t samples, Rng& rng,
                                  LogBase base = LogBase::kNatural);

// Tracks the cumulative budget of repeated releases at fixed order 1.5
// under sequential composition.
class PrivacyAccountant {
 public:
  PrivacyAccountant(double per_round_epsilon, LogBase base)
      : per_round_epsilon_(per_round_epsilon), base_(base) {}

  static constexpr double kOrder = 1.5;

  void record_round() { ++rounds_; }
  std::int64_t rounds() const { return rounds_; }
  double per_round_epsilon() const { return per_round_epsilon_; }
  double cumulative_epsilon() const {
    return per_round_epsilon_ * static_cast<double>(rounds_);
  }
  double dp_epsilon(double gamma) const {
    return compose_to_dp(per_round_epsilon_, rounds_, gamma, base_);
  }
  LogBase base() const { return base_; }

 private:
  double per_round_epsilon_;
  LogBase base_;
  std::int64_t rounds_ = 0;
};

}  // namespace dgrec

#endif  // DGREC_PRIVACY_HPP_
