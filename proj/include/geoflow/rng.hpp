#pragma once

// Seeded sampling helpers. All randomized checks in the library accept an
// explicit seed so runs are reproducible.

#include <random>

namespace geoflow {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }

  // Uniform on [lo, hi] with |value| >= margin, for sampling away from
  // denominator zeros.
  double uniform_away_from_zero(double lo, double hi, double margin) {
    for (;;) {
      double v = uniform(lo, hi);
      if (std::abs(v) >= margin) return v;
    }
  }

  int uniform_int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(gen_);
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace geoflow
