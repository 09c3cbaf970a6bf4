#include "ccg/random.hpp"

#include <cmath>

namespace ccg {

double UnitUniform(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double UniformIn(Rng& rng, double lo, double hi) { return lo + (hi - lo) * UnitUniform(rng); }

Vector SampleSimplex(Rng& rng, Eigen::Index size) {
  Vector v(size);
  for (Eigen::Index k = 0; k < size; ++k) v[k] = -std::log1p(-UnitUniform(rng));
  const double total = v.sum();
  if (!(total > 0.0)) return Vector::Constant(size, 1.0 / static_cast<double>(size));
  return v / total;
}

std::uint64_t SplitMix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace ccg
