#ifndef POVMLAB_RNG_HPP
#define POVMLAB_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

#include "povmlab/common.hpp"

namespace povmlab {

// splitmix64 generator. Self-contained so that streams are reproducible
// bit-for-bit independent of standard-library distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - next_unit();  // (0, 1]
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  Complex next_complex_gaussian() {
    const double re = next_gaussian();
    const double im = next_gaussian();
    return Complex(re, im);
  }

  // Independent substream for object `index`; batch generation with
  // per-index substreams is order-independent.
  Rng substream(std::uint64_t index) const {
    Rng mixer(state_ ^ (0x632BE59BD9B4E019ULL * (index + 1)));
    return Rng(mixer.next_u64());
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace povmlab

#endif  // POVMLAB_RNG_HPP
