#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace sentiment {

// Seeded generator with platform-independent derived draws. The standard
// distributions are implementation-defined, so uniform reals, bounded
// integers and shuffles are derived from the raw 64-bit stream here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1] with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * (1.0 / 9007199254740991.0);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sentiment
