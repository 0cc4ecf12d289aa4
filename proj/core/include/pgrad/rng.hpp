#pragma once

#include <cmath>
#include <cstdint>

namespace pgrad {

// Counter-based generator: every draw is a pure function of
// (seed, trial, draw), so trial i can be reproduced in isolation and the
// stream is identical across platforms.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  // Uniform in [0,1).
  double uniform(std::uint64_t trial, std::uint64_t draw) const {
    return static_cast<double>(bits(trial, draw) >> 11) * 0x1.0p-53;
  }

  double uniform_in(std::uint64_t trial, std::uint64_t draw, double lo,
                    double hi) const {
    return lo + (hi - lo) * uniform(trial, draw);
  }

  // Log-uniform over [lo, hi], lo > 0.
  double log_uniform(std::uint64_t trial, std::uint64_t draw, double lo,
                     double hi) const {
    return std::exp(uniform_in(trial, draw, std::log(lo), std::log(hi)));
  }

  std::uint64_t bits(std::uint64_t trial, std::uint64_t draw) const {
    std::uint64_t z = seed_;
    z = mix(z ^ (0x9E3779B97F4A7C15ULL * (trial + 1)));
    z = mix(z ^ (0xC2B2AE3D27D4EB4FULL * (draw + 1)));
    return z;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
};

}  // namespace pgrad
