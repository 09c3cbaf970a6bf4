#pragma once

#include <cstdint>
#include <vector>

#include "ccg/tightening.hpp"

namespace ccg {

constexpr double kDefaultSupportThreshold = 1e-3;

// Probability that the joint pure strategy drawn from x satisfies constraint
// `position` exactly (g >= 0, boundary counts as satisfied).
double RealizedFeasibility(const AugmentedGame& game, const MixProfile& x,
                           const StrategyProfile& s, std::size_t position);

double ExpectedCost(const AugmentedGame& game, const MixProfile& x, const StrategyProfile& s,
                    std::size_t player);

// Smallest constraint distance over joint strategies whose probability
// exceeds `threshold`. Requires 0 < threshold <= 1e-3 and a constraint that
// exposes a distance.
double MinSupportedDistance(const AugmentedGame& game, const MixProfile& x,
                            const StrategyProfile& s, std::size_t position,
                            double threshold = kDefaultSupportThreshold);

// Number of weights above `threshold`.
std::size_t SupportSize(const Vector& weights, double threshold = kDefaultSupportThreshold);

// Infinity norm of the reformulated KKT residual at the solution.
double KktResidual(const AugmentedGame& game, const Solution& solution, double omega);

// Largest unilateral cost decrease found by random deviations that respect
// the deviating player's own soft constraints at `omega`. Zero when none of
// the samples improves.
double ImprovementProbe(const AugmentedGame& game, const Solution& solution, double omega,
                        int trials, std::uint64_t seed);
// Weight-only variant for fixed tensor games.
double ImprovementProbe(const TensorGame& game, const MixProfile& x, int trials,
                        std::uint64_t seed);

struct EvaluationOptions {
  double support_threshold = kDefaultSupportThreshold;
  int probe_trials = 1000;  // per player; 0 skips the probe
  std::uint64_t seed = 0;
};

struct EvaluationReport {
  std::vector<double> expected_costs;     // per player
  std::vector<double> feasibility;        // per constraint
  MixProfile weights;                     // per player
  std::vector<std::size_t> support_sizes; // per player
  std::vector<double> min_distances;      // per constraint, NaN without a distance
  double kkt_residual = 0.0;
  double improvement = 0.0;
};

// The omega used for soft quantities is the one the solution reached.
EvaluationReport Evaluate(const AugmentedGame& game, const Solution& solution,
                          const EvaluationOptions& options = {});

}  // namespace ccg
