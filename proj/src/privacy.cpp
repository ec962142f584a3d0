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

#include "dgrec/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>
#include <stdexcept>

namespace dgrec {

double log_in_base(double x, LogBase base) {
  return base == LogBase::kNatural ? std::log(x) : std::log10(x);
}

void LdpConfig::validate() const {
  if (!(clip > 0.0)) throw std::invalid_argument("clip must be positive");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
}

double LdpConfig::positive_probability(double g) const {
  const double z = std::exp(beta) + 1.0;
  return 1.0 / z + (z - 2.0) * (g + clip) / (2.0 * z * clip);
}

double LdpConfig::decode_scale() const {
  const double eb = std::exp(beta);
  return clip * (eb + 1.0) / (eb - 1.0);
}

Eigen::VectorXd clip(const Eigen::VectorXd& g, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("clip must be positive");
  return g.cwiseMin(delta).cwiseMax(-delta);
}

EncodedGradient encode(const Eigen::VectorXd& g, const LdpConfig& cfg,
                       Rng& rng, UserId origin, std::int32_t round) {
  cfg.validate();
  EncodedGradient out;
  out.origin = origin;
  out.round = round;
  out.bits.resize(static_cast<std::size_t>(g.size()));
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double v = std::clamp(g(i), -cfg.clip, cfg.clip);
    out.bits[static_cast<std::size_t>(i)] =
        rng.bernoulli(cfg.positive_probability(v)) ? 1 : -1;
  }
  return out;
}

Eigen::VectorXd decode(std::span<const EncodedGradient> encodings,
                       const LdpConfig& cfg) {
  cfg.validate();
  if (encodings.empty()) {
    throw std::invalid_argument("decode requires at least one encoding");
  }
  const std::size_t n = encodings.front().size();
  std::set<UserId> origins;
  for (const auto& e : encodings) {
    if (e.size() != n) {
      throw std::invalid_argument("encodings differ in length");
    }
    if (!origins.insert(e.origin).second) {
      throw std::invalid_argument("duplicate origin " +
                                  std::to_string(e.origin));
    }
  }
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (const auto& e : encodings) {
    for (std::size_t i = 0; i < n; ++i) {
      mean(static_cast<Eigen::Index>(i)) += static_cast<double>(e.bits[i]);
    }
  }
  mean /= static_cast<double>(encodings.size());
  return cfg.decode_scale() * mean;
}

std::vector<std::uint8_t> EncodedGradient::serialize() const {
  std::vector<std::uint8_t> buf(wire_bytes(), 0);
  const auto put_le = [&buf](std::size_t at, std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) {
      buf[at + static_cast<std::size_t>(i)] =
          static_cast<std::uint8_t>(v >> (8 * i));
    }
  };
  put_le(0, static_cast<std::uint64_t>(origin), 8);
  put_le(8, static_cast<std::uint32_t>(round), 4);
  put_le(12, static_cast<std::uint32_t>(bits.size()), 4);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] > 0) buf[16 + i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  }
  return buf;
}

EncodedGradient EncodedGradient::deserialize(
    std::span<const std::uint8_t> buf) {
  if (buf.size() < 16) throw std::invalid_argument("truncated header");
  const auto get_le = [&buf](std::size_t at, int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) {
      v |= static_cast<std::uint64_t>(buf[at + static_cast<std::size_t>(i)])
           << (8 * i);
    }
    return v;
  };
  EncodedGradient out;
  out.origin = static_cast<UserId>(get_le(0, 8));
  out.round = static_cast<std::int32_t>(get_le(8, 4));
  const auto n = static_cast<std::size_t>(get_le(12, 4));
  if (buf.size() != 16 + (n + 7) / 8) {
    throw std::invalid_argument("payload length mismatch");
  }
  out.bits.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.bits[i] = (buf[16 + i / 8] >> (i % 8)) & 1u ? 1 : -1;
  }
  return out;
}

double rdp_epsilon(std::int64_t n_s, double delta, double beta,
                   LogBase base) {
  if (n_s < 1) throw std::invalid_argument("n_s must be at least 1");
  if (!(delta > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument("delta and beta must be positive");
  }
  const double z = std::exp(beta) + 1.0;
  const double inner = 1.5 * M_PI * delta * z / (2.0 * (z - 2.0)) +
                       (std::exp(-0.5 * beta) + std::exp(1.5 * beta)) / z;
  return 2.0 * static_cast<double>(n_s) * log_in_base(inner, base);
}

double compose_to_dp(double per_round_epsilon, std::int64_t rounds,
                     double gamma, LogBase base) {
  if (rounds < 0) throw std::invalid_argument("rounds must be nonnegative");
  if (!(gamma > 0.0) || gamma > 1.0) {
    throw std::invalid_argument("gamma must be in (0, 1]");
  }
  return per_round_epsilon * static_cast<double>(rounds) +
         2.0 * log_in_base(1.0 / gamma, base);
}

double two_point_renyi_divergence(const LdpConfig& cfg, double g_a,
                                  double g_b, LogBase base) {
  cfg.validate();
  const double pa = cfg.positive_probability(g_a);
  const double pb = cfg.positive_probability(g_b);
  const double sum = std::pow(pa, 1.5) * std::pow(pb, -0.5) +
                     std::pow(1.0 - pa, 1.5) * std::pow(1.0 - pb, -0.5);
  return 2.0 * log_in_base(sum, base);
}

double empirical_renyi_divergence(const LdpConfig& cfg, double g_a,
                                  double g_b, std::int64_t samples, Rng& rng,
                                  LogBase base) {
  cfg.validate();
  if (samples < 1) throw std::invalid_argument("samples must be positive");
  const double pa = cfg.positive_probability(g_a);
  const double pb = cfg.positive_probability(g_b);
  // Importance estimator E_{x~P}[(P(x)/Q(x))^{alpha-1}] at alpha = 1.5.
  double acc = 0.0;
  for (std::int64_t i = 0; i < samples; ++i) {
    if (rng.bernoulli(pa)) {
      acc += std::sqrt(pa / pb);
    } else {
      acc += std::sqrt((1.0 - pa) / (1.0 - pb));
    }
  }
  return 2.0 * log_in_base(acc / static_cast<double>(samples), base);
}

}  // namespace dgrec
