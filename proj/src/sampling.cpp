#include "opval/sampling.hpp"

#include <utility>
#include <vector>

namespace opval {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream,
                       std::uint64_t index) {
  std::uint64_t z = seed;
  for (std::uint64_t salt : {stream, index}) {
    z += 0x9e3779b97f4a7c15ULL + salt;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
  }
  return z;
}

Distribution sample_simplex(std::size_t dim, Rng& rng) {
  if (dim == 0) throw Error(ErrorCode::kBadDim, "simplex dimension must be >= 1");
  std::vector<double> draws(dim);
  double total = 0.0;
  for (double& v : draws) {
    v = rng.exponential();
    total += v;
  }
  for (double& v : draws) v /= total;
  return Distribution(std::move(draws));
}

Distribution sample_simplex(std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  return sample_simplex(dim, rng);
}

ConditionalKernel sample_kernel(std::size_t nx, std::size_t ny, Rng& rng) {
  std::vector<double> k;
  k.reserve(nx * ny);
  for (std::size_t x = 0; x < nx; ++x) {
    const Distribution row = sample_simplex(ny, rng);
    k.insert(k.end(), row.values().begin(), row.values().end());
  }
  return ConditionalKernel(nx, ny, std::move(k));
}

JointDistribution sample_joint(std::size_t nx, std::size_t ny, Rng& rng) {
  const Distribution flat = sample_simplex(nx * ny, rng);
  return JointDistribution(nx, ny, {flat.values().begin(), flat.values().end()});
}

}  // namespace opval
