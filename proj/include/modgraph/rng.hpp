#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "modgraph/geometry.hpp"

namespace modgraph {

// Deterministic random source. Distributions are hand-rolled on top of the
// (standard-specified) mt19937_64 sequence because the std distribution
// classes are implementation-defined and would break cross-platform
// reproducibility of generated datasets.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::int64_t uniform_int(std::int64_t n) {
    return static_cast<std::int64_t>(uniform() * static_cast<double>(n));
  }

  // Standard normal via Box-Muller; one draw consumes exactly two uniforms.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]: keeps log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  // Independent child seed (for per-scene generators).
  std::uint64_t next_seed() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace modgraph
