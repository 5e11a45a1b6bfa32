// Copyright 2026 The ldpqif Authors
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

#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace ldpqif {

// splitmix64 finalizer; the mixing core of the counter-based generator.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Counter-based stream: the state advances by the splitmix64 increment and
// each output is the finalizer of the current state. Streams are derived by
// folding a path of indices (trial, user, phase, ...) into the master seed,
// so any substream is addressable without sequential generation — the basis
// of the lane-count-independent determinism contract.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  static RngStream derive(std::uint64_t master,
                          std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = mix64(master);
    for (std::uint64_t p : path) h = mix64(h ^ mix64(p));
    return RngStream(h);
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1), 53-bit mantissa.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1); safe to pass through a logarithm.
  double next_double_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Unbiased uniform integer in [0, n) via multiply-with-rejection.
  std::uint64_t next_below(std::uint64_t n) {
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      const std::uint64_t threshold = (0ULL - n) % n;
      while (lo < threshold) {
        x = next_u64();
        m = static_cast<__uint128_t>(x) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool bernoulli(double p) { return next_double() < p; }

  // Centered Laplace via inverse CDF on one open-interval uniform;
  // no rejection, one draw per variate.
  double laplace(double scale) {
    const double u = next_double_open() - 0.5;
    const double mag = -std::log(1.0 - 2.0 * std::abs(u));
    if (mag == 0.0) return 0.0;
    return (u < 0.0 ? -scale : scale) * mag;
  }

 private:
  std::uint64_t state_;
};

}  // namespace ldpqif
