#pragma once

#include "tmr/types.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace tmr {

// Seeded generator with fully specified draw procedures, so that results are
// reproducible bit-for-bit from (inputs, seed) alone.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1).
  Scalar uniform() {
    return static_cast<Scalar>(gen_() >> 11) * 0x1.0p-53;
  }

  // Standard normal via the polar (Marsaglia) method, no state carried
  // between calls.
  Scalar normal() {
    for (;;) {
      const Scalar u = 2.0 * uniform() - 1.0;
      const Scalar v = 2.0 * uniform() - 1.0;
      const Scalar s = u * u + v * v;
      if (s > 0.0 && s < 1.0) {
        return u * std::sqrt(-2.0 * std::log(s) / s);
      }
    }
  }

  // Uniform index in [0, n), unbiased via rejection.
  Index index(Index n) {
    const std::uint64_t un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return static_cast<Index>(x % un);
  }

  // In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (Index i = static_cast<Index>(v.size()) - 1; i > 0; --i) {
      std::swap(v[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(index(i + 1))]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace tmr
