#pragma once

#include <cstdint>
#include <random>

namespace kite {

// Seeded RNG with hand-rolled distributions so that identical seeds produce
// identical streams on every platform (std::uniform_real_distribution is
// implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t uniform_index(std::uint64_t n) {
    // Rejection-free modulo is fine here; n is tiny compared to 2^64.
    return engine_() % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace kite
