#pragma once

#include <cstddef>
#include <cstdint>
#include <cmath>
#include <random>

#include "opval/core.hpp"

namespace opval {

/// Seeded generator with fully specified output (mt19937_64 plus explicit
/// transforms), so sampled objects are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1).
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }
  /// Standard exponential, strictly positive.
  double exponential() { return -std::log(uniform_open()); }
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform_open() * static_cast<double>(n)) %
           n;
  }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used to derive independent per-trial seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream,
                       std::uint64_t index = 0);

/// Uniform draw from the probability simplex (Dirichlet(1, ..., 1)),
/// obtained by normalizing independent standard exponentials.
Distribution sample_simplex(std::size_t dim, Rng& rng);
Distribution sample_simplex(std::size_t dim, std::uint64_t seed);

/// Random kernel whose rows are independent simplex draws.
ConditionalKernel sample_kernel(std::size_t nx, std::size_t ny, Rng& rng);

/// Random joint distribution on nx x ny.
JointDistribution sample_joint(std::size_t nx, std::size_t ny, Rng& rng);

}  // namespace opval
