#include "ccg/tightening.hpp"

#include <cmath>
#include <functional>

namespace ccg {

void TighteningConfig::Validate() const {
  if (!(omega_initial > 0.0) || !(omega_initial <= omega_desired)) {
    throw ConfigurationError("need 0 < omega_initial <= omega_desired");
  }
  if (!(omega_min_accept <= omega_desired)) {
    throw ConfigurationError("omega_min_accept must not exceed omega_desired");
  }
  solver.Validate();
}

const char* ToString(SolutionStatus status) {
  return status == SolutionStatus::kSolved ? "solved" : "failed";
}

std::vector<double> OmegaSchedule(double omega_initial, double omega_desired) {
  std::vector<double> schedule;
  for (double omega = omega_initial; omega < 2.0 * omega_desired; omega *= 2.0) {
    schedule.push_back(omega);
  }
  return schedule;
}

Vector PackSolution(const VariableLayout& layout, const Solution& solution) {
  return layout.Pack(solution.x, solution.s, solution.lambda, solution.gamma);
}

namespace {

constexpr int kMaxHalvings = 4;

// One solve at `omega` warm-started from `current`; on convergence the
// iterate is replaced, otherwise left untouched.
bool SolveStage(const AugmentedGame& game, const VariableLayout& layout, double omega,
                const SolverOptions& opts, Solution& current) {
  const MCPInstance mcp = AssembleAugmentedMCP(game, omega);
  const SolveOutcome outcome = Solve(mcp, PackSolution(layout, current), opts);
  ++current.solves;
  current.newton_iterations += outcome.iterations;
  if (!outcome.converged()) return false;
  current.x = layout.Weights(outcome.z);
  current.s = layout.Strategies(outcome.z);
  current.lambda = layout.SimplexDuals(outcome.z);
  current.gamma = layout.ConstraintDuals(outcome.z);
  return true;
}

// Reaches `to` from the solved value `from` after the direct step failed,
// splitting at `midpoint` up to `depth` levels.
bool Continue(double from, double to, int depth,
              const std::function<double(double, double)>& midpoint,
              const std::function<bool(double)>& solve_at) {
  if (depth == 0) return false;
  const double mid = midpoint(from, to);
  const auto step = [&](double a, double b) {
    return solve_at(b) || Continue(a, b, depth - 1, midpoint, solve_at);
  };
  return step(from, mid) && step(mid, to);
}

AugmentedGame ScaleThresholds(const AugmentedGame& game, double factor) {
  AugmentedGame scaled = game;
  for (ConstraintFunction& c : scaled.constraints) {
    for (double& t : c.spec.thresholds) t *= factor;
  }
  return scaled;
}

}  // namespace

Solution IterativeTighten(const AugmentedGame& game, const MixProfile& x0,
                          const StrategyProfile& s0, const TighteningConfig& cfg,
                          const StageObserver& observer) {
  cfg.Validate();
  game.Validate();
  ValidateMixProfile(x0, game.strategy_counts, 1e-6);
  game.ValidateStrategies(s0);

  const VariableLayout layout = VariableLayout::ForAugmentedGame(game);
  Solution current;
  current.x = x0;
  current.s = s0;
  current.lambda = Vector::Zero(static_cast<Eigen::Index>(layout.simplex_duals.size()));
  current.gamma = Vector::Zero(static_cast<Eigen::Index>(layout.constraint_duals.size()));

  // Simplex duals start at the expected costs, which is what the weight rows
  // give them when the constraint duals vanish.
  {
    const TensorGame lifted = Lift(game, s0, game.indicator.WithOmega(cfg.omega_initial));
    for (std::size_t i = 0; i < game.num_players(); ++i)
      current.lambda[static_cast<Eigen::Index>(i)] = FullContract(lifted.costs[i], x0);
  }
  const bool expectation = game.indicator.mode == IndicatorMode::kExpectation;
  const std::vector<double> schedule =
      expectation ? std::vector<double>{cfg.omega_desired}
                  : OmegaSchedule(cfg.omega_initial, cfg.omega_desired);

  SolverOptions opts = cfg.solver;
  double previous = 0.0;
  for (std::size_t stage = 0; stage < schedule.size(); ++stage) {
    const double omega = schedule[stage];
    opts.seed = cfg.solver.seed + stage;
    bool converged = SolveStage(game, layout, omega, opts, current);
    if (!converged && previous > 0.0) {
      // Retry the doubling as a chain of smaller steps from the last success.
      converged = Continue(previous, omega, kMaxHalvings, [](double a, double b) {
        return std::sqrt(a * b);
      }, [&](double w) { return SolveStage(game, layout, w, opts, current); });
    } else if (!converged) {
      // Approach a failed first stage from the unconstrained game by raising
      // every threshold from zero to its target.
      const auto at_scale = [&](double t) {
        return SolveStage(ScaleThresholds(game, t), layout, omega, opts, current);
      };
      converged = at_scale(0.0) &&
                  (at_scale(1.0) ||
                   Continue(0.0, 1.0, kMaxHalvings,
                            [](double a, double b) { return 0.5 * (a + b); }, at_scale));
    }
    if (!converged) {
      if (observer) observer({omega, false, &current});
      break;
    }
    current.omega_reached = omega;
    previous = omega;
    if (observer) observer({omega, true, &current});
  }

  if (expectation) {
    current.status =
        current.omega_reached > 0.0 ? SolutionStatus::kSolved : SolutionStatus::kFailed;
  } else {
    current.status = current.omega_reached >= cfg.omega_min_accept ? SolutionStatus::kSolved
                                                                    : SolutionStatus::kFailed;
  }
  return current;
}

}  // namespace ccg
