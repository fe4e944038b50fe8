#pragma once

#include <cstdint>
#include <random>

namespace graphot {

// Deterministic RNG: distributions are hand-rolled from raw mt19937_64 words
// so that seeded runs produce identical streams across platforms and
// standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  int uniform_int(int n) { return static_cast<int>(eng_() % static_cast<std::uint64_t>(n)); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace graphot
