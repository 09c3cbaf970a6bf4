#include "ccg/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ccg/kkt.hpp"
#include "ccg/random.hpp"

namespace ccg {
namespace {

const ConstraintFunction& ConstraintAt(const AugmentedGame& game, std::size_t position) {
  if (position >= game.constraints.size()) {
    throw std::out_of_range("constraint position " + std::to_string(position));
  }
  return game.constraints[position];
}

void CheckProfiles(const AugmentedGame& game, const MixProfile& x, const StrategyProfile& s) {
  ValidateMixProfile(x, game.strategy_counts, 1e-6);
  if (s.size() != game.num_players()) throw ShapeError("strategy profile has wrong player count");
}

// Soft satisfaction of every constraint the player owns, each paired with
// that player's threshold.
struct OwnedSoft {
  std::vector<std::size_t> positions;
  std::vector<double> thresholds;
};

OwnedSoft OwnedBy(const AugmentedGame& game, std::size_t player) {
  OwnedSoft owned;
  owned.positions = game.OwnedConstraints(player);
  for (std::size_t pos : owned.positions) {
    owned.thresholds.push_back(game.constraints[pos].spec.ThresholdFor(player));
  }
  return owned;
}

bool SoftFeasible(const std::vector<DenseTensor>& q, const std::vector<double>& thresholds,
                  const MixProfile& x) {
  for (std::size_t k = 0; k < q.size(); ++k) {
    if (FullContract(q[k], x) < thresholds[k]) return false;
  }
  return true;
}

Vector MixToward(Rng& rng, const Vector& w) {
  const Vector target = SampleSimplex(rng, w.size());
  const double step = UnitUniform(rng);
  return (1.0 - step) * w + step * target;
}

}  // namespace

double RealizedFeasibility(const AugmentedGame& game, const MixProfile& x,
                           const StrategyProfile& s, std::size_t position) {
  CheckProfiles(game, x, s);
  const auto& g = ConstraintAt(game, position).g.value;
  return FullContract(FillFrom([&](const Vector& joint) { return g(joint) >= 0.0 ? 1.0 : 0.0; }, s),
                      x);
}

double ExpectedCost(const AugmentedGame& game, const MixProfile& x, const StrategyProfile& s,
                    std::size_t player) {
  CheckProfiles(game, x, s);
  if (player >= game.num_players()) throw std::out_of_range("player " + std::to_string(player));
  return FullContract(FillFrom(game.costs[player].value, s), x);
}

double MinSupportedDistance(const AugmentedGame& game, const MixProfile& x,
                            const StrategyProfile& s, std::size_t position, double threshold) {
  CheckProfiles(game, x, s);
  if (!(threshold > 0.0 && threshold <= kDefaultSupportThreshold)) {
    throw std::invalid_argument("support threshold must lie in (0, 1e-3]");
  }
  const auto& distance = ConstraintAt(game, position).distance;
  if (!distance) throw std::invalid_argument("constraint exposes no distance");

  const DenseTensor d = FillFrom(distance, s);
  double best = std::numeric_limits<double>::infinity();
  ForEachIndex(d.shape(), [&](const JointIndex& index, std::size_t flat) {
    double p = 1.0;
    for (std::size_t i = 0; i < index.size(); ++i) p *= x[i][static_cast<Eigen::Index>(index[i])];
    if (p > threshold) best = std::min(best, d[flat]);
  });
  if (!std::isfinite(best)) throw std::runtime_error("no joint strategy above support threshold");
  return best;
}

std::size_t SupportSize(const Vector& weights, double threshold) {
  return static_cast<std::size_t>((weights.array() > threshold).count());
}

double KktResidual(const AugmentedGame& game, const Solution& solution, double omega) {
  const MCPInstance mcp = AssembleAugmentedMCP(game, omega);
  const Vector z = PackSolution(mcp.layout, solution);
  return ReformulatedResidual(mcp, z).lpNorm<Eigen::Infinity>();
}

double ImprovementProbe(const AugmentedGame& game, const Solution& solution, double omega,
                        int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("probe needs at least one trial");
  const IndicatorConfig indicator = game.indicator.WithOmega(omega);
  Rng rng(seed);
  double best = 0.0;

  for (std::size_t i = 0; i < game.num_players(); ++i) {
    const OwnedSoft owned = OwnedBy(game, i);
    const double base = FullContract(FillFrom(game.costs[i].value, solution.s), solution.x);
    const StrategyBox& box = game.boxes[i];

    for (int t = 0; t < trials; ++t) {
      // Alternate between moving weights, strategies, or both.
      const int kind = t % 3;
      MixProfile x = solution.x;
      StrategyProfile s = solution.s;
      if (kind != 1) x[i] = MixToward(rng, x[i]);
      if (kind != 0) {
        const double reach = 0.25 * UnitUniform(rng);
        for (Eigen::Index r = 0; r < s[i].rows(); ++r) {
          for (Eigen::Index c = 0; c < s[i].cols(); ++c) {
            const double span = box.upper[c] - box.lower[c];
            const double moved = s[i](r, c) + reach * span * (2.0 * UnitUniform(rng) - 1.0);
            s[i](r, c) = std::clamp(moved, box.lower[c], box.upper[c]);
          }
        }
      }
      std::vector<DenseTensor> q;
      for (std::size_t pos : owned.positions) {
        const auto& g = game.constraints[pos].g.value;
        q.push_back(
            FillFrom([&](const Vector& joint) { return IndicatorApply(indicator, g(joint)); }, s));
      }
      if (!SoftFeasible(q, owned.thresholds, x)) continue;
      const double cost = FullContract(FillFrom(game.costs[i].value, s), x);
      best = std::max(best, base - cost);
    }
  }
  return best;
}

double ImprovementProbe(const TensorGame& game, const MixProfile& x, int trials,
                        std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("probe needs at least one trial");
  game.Validate();
  ValidateMixProfile(x, game.strategy_counts(), 1e-6);
  Rng rng(seed);
  double best = 0.0;

  for (std::size_t i = 0; i < game.num_players(); ++i) {
    std::vector<DenseTensor> q;
    std::vector<double> thresholds;
    for (const TensorConstraint& c : game.constraints) {
      if (!c.spec.IsOwnedBy(i)) continue;
      q.push_back(c.q);
      thresholds.push_back(c.spec.ThresholdFor(i));
    }
    const double base = FullContract(game.costs[i], x);
    for (int t = 0; t < trials; ++t) {
      MixProfile trial = x;
      trial[i] = MixToward(rng, x[i]);
      if (!SoftFeasible(q, thresholds, trial)) continue;
      best = std::max(best, base - FullContract(game.costs[i], trial));
    }
  }
  return best;
}

EvaluationReport Evaluate(const AugmentedGame& game, const Solution& solution,
                          const EvaluationOptions& options) {
  EvaluationReport report;
  const double omega = solution.omega_reached > 0.0 ? solution.omega_reached : 1.0;
  for (std::size_t i = 0; i < game.num_players(); ++i) {
    report.expected_costs.push_back(ExpectedCost(game, solution.x, solution.s, i));
    report.weights.push_back(solution.x[i]);
    report.support_sizes.push_back(SupportSize(solution.x[i], options.support_threshold));
  }
  for (std::size_t j = 0; j < game.constraints.size(); ++j) {
    report.feasibility.push_back(RealizedFeasibility(game, solution.x, solution.s, j));
    report.min_distances.push_back(
        game.constraints[j].distance
            ? MinSupportedDistance(game, solution.x, solution.s, j, options.support_threshold)
            : std::numeric_limits<double>::quiet_NaN());
  }
  report.kkt_residual = KktResidual(game, solution, omega);
  if (options.probe_trials > 0) {
    report.improvement =
        ImprovementProbe(game, solution, omega, options.probe_trials, options.seed);
  }
  return report;
}

}  // namespace ccg
