#pragma once

#include <cstdint>
#include <random>

#include "ccg/tensor.hpp"

namespace ccg {

using Rng = std::mt19937_64;

// Uniform double in [0, 1) built from the top 53 bits, identical on every
// standard library.
double UnitUniform(Rng& rng);

double UniformIn(Rng& rng, double lo, double hi);

// Uniform point on the probability simplex (Dirichlet with unit
// concentration) via normalized exponential draws.
Vector SampleSimplex(Rng& rng, Eigen::Index size);

// One step of the splitmix64 sequence; used to derive independent seeds.
std::uint64_t SplitMix64(std::uint64_t& state);

}  // namespace ccg
