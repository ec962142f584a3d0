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

#ifndef DGREC_RNG_HPP_
#define DGREC_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace dgrec {

// Deterministic random source with keyed substreams.
//
// Every stochastic step in the system draws from a stream keyed by
// (global seed, stream tag, a, b), so results are bitwise reproducible
// regardless of execution order or thread count. All distributions are
// generated from raw mt19937_64 output instead of std::*_distribution,
// whose mappings are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Derives an independent substream. The tag separates call sites, a/b
  // carry e.g. (round, user id).
  static Rng keyed(std::uint64_t seed, std::string_view tag,
                   std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t h = seed;
    for (char c : tag) h = splitmix(h ^ static_cast<std::uint64_t>(c));
    h = splitmix(h ^ a);
    h = splitmix(h ^ b);
    return Rng(h);
  }

  std::uint64_t next() { return gen_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). Rejection sampling keeps the draw unbiased.
  std::size_t uniform_index(std::size_t n) {
    const std::uint64_t limit =
        UINT64_MAX - (UINT64_MAX % static_cast<std::uint64_t>(n));
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return static_cast<std::size_t>(x % static_cast<std::uint64_t>(n));
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Zero-mean Laplace with the given scale, via inverse CDF.
  double laplace(double scale) {
    double v = uniform();
    while (v == 0.0) v = uniform();  // keep u strictly inside (-1/2, 1/2)
    const double u = v - 0.5;
    const double sign = u < 0.0 ? -1.0 : 1.0;
    return -scale * sign * std::log1p(-2.0 * std::fabs(u));
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_index(i)]);
    }
  }

 private:
  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::mt19937_64 gen_;
};

}  // namespace dgrec

#endif  // DGREC_RNG_HPP_
