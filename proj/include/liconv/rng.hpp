/* Copyright 2026 The liconv Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef LICONV_RNG_HPP_
#define LICONV_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>

namespace liconv {

// mt19937_64 plus hand-rolled transforms. std::uniform_real_distribution and
// friends are implementation-defined, which would break bit-reproducibility
// of generated datasets across standard libraries; the raw engine is pinned
// by the standard.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t raw() { return eng_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), n > 0. Modulo bias is irrelevant at 64 bits
  // for desk-scale n.
  int uniform_int(int n) { return int(eng_() % uint64_t(n)); }

  // Standard normal via Box-Muller; one value per call, no cached spare so
  // the draw count is obvious from call sites.
  double normal() {
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

  template <typename It>
  void shuffle(It first, It last) {
    auto n = last - first;
    for (auto i = n - 1; i > 0; --i) {
      auto j = eng_() % uint64_t(i + 1);
      std::swap(first[i], first[j]);
    }
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace liconv

#endif  // LICONV_RNG_HPP_
