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

#include <cmath>
#include <vector>

#include "doctest.h"

namespace dgrec {
namespace {

TEST_CASE("clip clamps elementwise") {
  Eigen::VectorXd g(3);
  g << -1.0, 0.0, 1.0;
  const Eigen::VectorXd c = clip(g, 0.1);
  CHECK(c(0) == doctest::Approx(-0.1));
  CHECK(c(1) == doctest::Approx(0.0));
  CHECK(c(2) == doctest::Approx(0.1));
  CHECK(clip(Eigen::VectorXd::Constant(1, 0.5), 0.1)(0) ==
        doctest::Approx(0.1));
  CHECK(clip(Eigen::VectorXd::Constant(1, -0.05), 0.1)(0) ==
        doctest::Approx(-0.05));
}

TEST_CASE("encoding probabilities hit the closed-form boundary values") {
  LdpConfig cfg{0.1, 1.0};
  const double e = std::exp(1.0);
  CHECK(cfg.positive_probability(0.0) == doctest::Approx(0.5));
  CHECK(cfg.positive_probability(0.1) == doctest::Approx(e / (e + 1.0)));
  CHECK(cfg.positive_probability(-0.1) == doctest::Approx(1.0 / (e + 1.0)));
}

TEST_CASE("encode produces +-1 bits at the expected rate") {
  LdpConfig cfg{0.1, 1.0};
  Rng rng(99);
  const Eigen::VectorXd g = Eigen::VectorXd::Constant(20000, 0.1);
  const EncodedGradient enc = encode(g, cfg, rng, 7, 3);
  CHECK(enc.origin == 7);
  CHECK(enc.round == 3);
  std::int64_t ones = 0;
  for (auto b : enc.bits) {
    CHECK((b == 1 || b == -1));
    if (b == 1) ++ones;
  }
  const double rate = static_cast<double>(ones) / 20000.0;
  CHECK(rate == doctest::Approx(std::exp(1.0) / (std::exp(1.0) + 1.0))
                    .epsilon(0.02));
}

TEST_CASE("decode matches the closed form on frozen inputs") {
  LdpConfig cfg{0.1, 1.0};
  EncodedGradient a{{1, 1, 1}, 1, 0};
  CHECK(decode(std::vector<EncodedGradient>{a}, cfg)(0) ==
        doctest::Approx(0.2163953413738653));

  // bits {+1, +1, -1} at one coordinate across three users
  EncodedGradient p{{1}, 1, 0}, q{{1}, 2, 0}, r{{-1}, 3, 0};
  const auto decoded = decode(std::vector<EncodedGradient>{p, q, r}, cfg);
  CHECK(decoded(0) == doctest::Approx(0.0721317804579551));

  EncodedGradient s{{1, -1}, 1, 0}, t{{-1, 1}, 2, 0};
  const auto zero = decode(std::vector<EncodedGradient>{s, t}, cfg);
  CHECK(zero(0) == doctest::Approx(0.0));
  CHECK(zero(1) == doctest::Approx(0.0));
}

TEST_CASE("decode rejects bad collections") {
  LdpConfig cfg{0.1, 1.0};
  CHECK_THROWS_AS(decode(std::vector<EncodedGradient>{}, cfg),
                  std::invalid_argument);
  EncodedGradient a{{1}, 1, 0}, b{{1}, 1, 0};
  CHECK_THROWS_WITH_AS(decode(std::vector<EncodedGradient>{a, b}, cfg),
                       doctest::Contains("duplicate origin"),
                       std::invalid_argument);
  EncodedGradient c{{1, 1}, 2, 0};
  CHECK_THROWS_AS(decode(std::vector<EncodedGradient>{a, c}, cfg),
                  std::invalid_argument);
}

TEST_CASE("decoded magnitude never exceeds the scale bound") {
  LdpConfig cfg{0.1, 1.0};
  Rng rng(5);
  std::vector<EncodedGradient> encs;
  for (int u = 0; u < 5; ++u) {
    Eigen::VectorXd g(8);
    for (int i = 0; i < 8; ++i) g(i) = (rng.uniform() - 0.5) * 0.4;
    encs.push_back(encode(g, cfg, rng, u, 0));
  }
  const auto decoded = decode(encs, cfg);
  CHECK(decoded.cwiseAbs().maxCoeff() <= cfg.decode_scale() + 1e-12);
}

TEST_CASE("privacy budget closed form matches frozen anchors") {
  CHECK(rdp_epsilon(1, 0.1, 1.0) == doctest::Approx(1.2607369480702788));
  CHECK(rdp_epsilon(1, 0.1, 1.0, LogBase::kBase10) ==
        doctest::Approx(0.5475310996784686));
  // linear in the gradient size
  CHECK(rdp_epsilon(8, 0.2, 2.0) ==
        doctest::Approx(8.0 * rdp_epsilon(1, 0.2, 2.0)));
}

TEST_CASE("rdp to dp conversion") {
  CHECK(compose_to_dp(1.5, 1, 1.0) == doctest::Approx(1.5));
  CHECK(compose_to_dp(1.2607369480702788, 10, 0.01) ==
        doctest::Approx(21.817709852678973));
  // monotone nonincreasing in gamma
  CHECK(compose_to_dp(1.0, 5, 0.5) >= compose_to_dp(1.0, 5, 0.9));
  CHECK_THROWS_AS(compose_to_dp(1.0, 1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(compose_to_dp(1.0, 1, 1.5), std::invalid_argument);
}

TEST_CASE("accountant composes sequentially") {
  PrivacyAccountant acct(0.25, LogBase::kNatural);
  for (int i = 0; i < 7; ++i) acct.record_round();
  CHECK(acct.rounds() == 7);
  CHECK(acct.cumulative_epsilon() == doctest::Approx(7 * 0.25));
  CHECK(acct.dp_epsilon(0.01) ==
        doctest::Approx(7 * 0.25 + 2.0 * std::log(100.0)));
}

TEST_CASE("two-point divergence anchors and bound") {
  LdpConfig cfg{0.1, 1.0};
  CHECK(two_point_renyi_divergence(cfg, 0.05, 0.05) == doctest::Approx(0.0));
  CHECK(two_point_renyi_divergence(cfg, 0.1, -0.1) ==
        doctest::Approx(0.6273326470494994));
  // symmetric under a sign flip of both inputs
  CHECK(two_point_renyi_divergence(cfg, 0.07, -0.02) ==
        doctest::Approx(two_point_renyi_divergence(cfg, -0.07, 0.02)));
  CHECK(two_point_renyi_divergence(cfg, 0.1, -0.1) <=
        rdp_epsilon(1, cfg.clip, cfg.beta));
}

TEST_CASE("worst-case pairs stay below the budget across configurations") {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    LdpConfig cfg{0.05 + rng.uniform() * 0.45, 0.5 + rng.uniform() * 3.5};
    const double a = (rng.uniform() * 2.0 - 1.0) * cfg.clip;
    const double b = (rng.uniform() * 2.0 - 1.0) * cfg.clip;
    CHECK(two_point_renyi_divergence(cfg, a, b) <=
          rdp_epsilon(1, cfg.clip, cfg.beta) + 1e-12);
  }
}

TEST_CASE("empirical divergence tracks the analytic value") {
  LdpConfig cfg{0.1, 1.0};
  Rng rng(17);
  CHECK(empirical_renyi_divergence(cfg, 0.03, 0.03, 10000, rng) ==
        doctest::Approx(0.0));
  Rng rng2(18);
  const double est =
      empirical_renyi_divergence(cfg, 0.1, -0.1, 200000, rng2);
  CHECK(est == doctest::Approx(two_point_renyi_divergence(cfg, 0.1, -0.1))
                   .epsilon(0.05));
}

TEST_CASE("mechanism is unbiased") {
  LdpConfig cfg{0.1, 1.0};
  Rng rng(3);
  const int dim = 6;
  Eigen::VectorXd g(dim);
  for (int i = 0; i < dim; ++i) g(i) = (rng.uniform() * 2.0 - 1.0) * cfg.clip;

  const int n = 20000;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(dim);
  for (int s = 0; s < n; ++s) {
    const EncodedGradient enc = encode(g, cfg, rng, s, 0);
    const auto one = decode(std::vector<EncodedGradient>{enc}, cfg);
    sum += one;
    sum_sq += one.cwiseProduct(one);
  }
  for (int i = 0; i < dim; ++i) {
    const double mean = sum(i) / n;
    const double var = sum_sq(i) / n - mean * mean;
    const double stderr_i = std::sqrt(var / n);
    CHECK(std::fabs(mean - g(i)) <= 4.0 * stderr_i);
  }
}

TEST_CASE("wire format is one bit per coordinate plus the header") {
  Rng rng(8);
  for (std::size_t n : {1u, 7u, 8u, 9u, 64u, 133u}) {
    EncodedGradient e;
    e.origin = 123456789;
    e.round = 42;
    e.bits.resize(n);
    for (auto& b : e.bits) b = rng.bernoulli(0.5) ? 1 : -1;
    const auto buf = e.serialize();
    CHECK(buf.size() == 16 + (n + 7) / 8);
    const auto back = EncodedGradient::deserialize(buf);
    CHECK(back.origin == e.origin);
    CHECK(back.round == e.round);
    CHECK(back.bits == e.bits);
  }
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(rdp_epsilon(0, 0.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(rdp_epsilon(1, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(rdp_epsilon(1, 0.1, 0.0), std::invalid_argument);
  LdpConfig bad{0.0, 1.0};
  Rng rng(1);
  CHECK_THROWS_AS(encode(Eigen::VectorXd::Zero(1), bad, rng),
                  std::invalid_argument);
}

}  // namespace
}  // namespace dgrec
