#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

// Seeded random source with portable derived draws. The engine (mt19937_64)
// and every transform below are fully specified, so identical seeds produce
// identical streams on any platform. None of the std <random> distributions
// are used because their outputs are implementation-defined.

namespace recipnet {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double next_unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n) by rejection; n must be positive.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n == 0");
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {  // inclusive
    if (lo > hi) throw std::invalid_argument("Rng::uniform_int: lo > hi");
    return lo + static_cast<std::int64_t>(
                    below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  bool bernoulli(double p) { return next_unit() < p; }

  // Knuth's product-of-uniforms method, split so exp(-lambda) never
  // underflows for large rates.
  std::int64_t poisson(double lambda) {
    if (lambda < 0.0 || !std::isfinite(lambda)) {
      throw std::invalid_argument("Rng::poisson: bad lambda");
    }
    std::int64_t total = 0;
    while (lambda > 0.0) {
      const double chunk = lambda > 500.0 ? 500.0 : lambda;
      lambda -= chunk;
      const double threshold = std::exp(-chunk);
      double prod = 1.0;
      std::int64_t k = -1;
      do {
        ++k;
        prod *= next_unit();
      } while (prod > threshold);
      total += k;
    }
    return total;
  }

  template <class T>
  void shuffle(std::vector<T>& v) {  // Fisher-Yates
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace recipnet
