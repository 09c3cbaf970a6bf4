#include <cmath>

#include <gtest/gtest.h>

#include "ccg/evaluation.hpp"
#include "ccg/harness.hpp"
#include "ccg/scenarios.hpp"
#include "ccg/tightening.hpp"
#include "test_util.hpp"

namespace ccg {
namespace {

AugmentedGame SingleQuadratic() {
  AugmentedGame game;
  game.strategy_counts = {1};
  game.dims = {1};
  JointFunction f;
  f.value = [](const Vector& s) { return s[0] * s[0]; };
  f.gradient = [](const Vector& s) { return Vector(2.0 * s); };
  f.hessian = [](const Vector&) { return Matrix::Constant(1, 1, 2.0); };
  game.costs = {f};
  game.boxes = {StrategyBox::Cube(1, -2, 2)};
  game.indicator = IndicatorConfig::Chance(1.0);
  return game;
}

std::vector<Solution> HprRuns(int count, IndicatorMode mode = IndicatorMode::kChance) {
  const AugmentedGame game = HogPoacherRanger(
      {}, mode == IndicatorMode::kChance ? ConstraintSetup::Chance(0.8) : ConstraintSetup::Expectation());
  std::vector<Solution> out;
  for (const std::uint64_t seed : TrialSeeds(2024, static_cast<std::size_t>(count))) {
    const InitialPoint init = DrawInitialPoint(game, seed, -2, 2);
    TighteningConfig cfg;
    cfg.solver.seed = seed;
    out.push_back(IterativeTighten(game, init.x, init.s, cfg));
  }
  return out;
}

TEST(OmegaSchedule, Doubling) {
  EXPECT_EQ(OmegaSchedule(1, 64), (std::vector<double>{1, 2, 4, 8, 16, 32, 64}));
  EXPECT_EQ(OmegaSchedule(3, 3), std::vector<double>{3});
  EXPECT_EQ(OmegaSchedule(1, 5), (std::vector<double>{1, 2, 4, 8}));
}

TEST(TighteningConfig, Validation) {
  TighteningConfig cfg;
  cfg.omega_initial = 128;
  EXPECT_THROW(cfg.Validate(), ConfigurationError);
  cfg = {};
  cfg.omega_min_accept = 100;
  EXPECT_THROW(cfg.Validate(), ConfigurationError);
}

TEST(AugmentedMCP, SinglePlayerQuadraticSolvesToZero) {
  const AugmentedGame game = SingleQuadratic();
  const MCPInstance mcp = AssembleAugmentedMCP(game, 1.0);
  const Vector z0 = mcp.layout.Pack({Vector::Ones(1)}, {Matrix::Constant(1, 1, 1.5)},
                                    Vector::Zero(1), Vector::Zero(0));
  const SolveOutcome out = Solve(mcp, z0, {});
  ASSERT_TRUE(out.converged());
  EXPECT_NEAR(mcp.layout.Strategies(out.z)[0](0, 0), 0.0, 1e-8);
}

TEST(IterativeTighten, VisitsTheDoublingSchedule) {
  const AugmentedGame game = SingleQuadratic();
  std::vector<double> seen;
  const Solution sol = IterativeTighten(game, {Vector::Ones(1)}, {Matrix::Constant(1, 1, 1.0)}, {},
                                        [&](const StageRecord& r) {
                                          EXPECT_TRUE(r.converged);
                                          seen.push_back(r.omega);
                                        });
  EXPECT_EQ(seen, (std::vector<double>{1, 2, 4, 8, 16, 32, 64}));
  EXPECT_EQ(sol.solves, 7);
  EXPECT_EQ(sol.omega_reached, 64);
  EXPECT_TRUE(sol.solved());
}

TEST(IterativeTighten, HogPoacherRangerStructure) {
  const AugmentedGame game = HogPoacherRanger({}, ConstraintSetup::Chance(0.8));
  int solved = 0;
  for (const Solution& sol : HprRuns(6)) {
    const double k = std::log2(sol.omega_reached);
    if (sol.omega_reached > 0) EXPECT_EQ(k, std::round(k));
    if (!sol.solved()) continue;
    ++solved;
    EXPECT_GE(sol.omega_reached, 10);
    EXPECT_NEAR(sol.x[1][0], 0.5, 0.02);
    EXPECT_NEAR(sol.x[1][1], 0.5, 0.02);
    EXPECT_NEAR(MinSupportedDistance(game, sol.x, sol.s, 0), 1.0, 0.05);
    EXPECT_LE(KktResidual(game, sol, sol.omega_reached), 1e-8);
    EXPECT_NO_THROW(game.ValidateStrategies(sol.s));
    EXPECT_GE(sol.gamma.minCoeff(), 0.0);
    const TensorGame lifted = Lift(game, sol.s, IndicatorConfig::Chance(sol.omega_reached));
    EXPECT_GE(ConstraintSatisfaction(lifted, sol.x, 0), 0.8 - 1e-6);
    for (const Vector& xi : sol.x) EXPECT_NEAR(xi.sum(), 1.0, 1e-8);
  }
  EXPECT_GE(solved, 3);
}

TEST(IterativeTighten, ExpectationModeTakesOneSolve) {
  for (const Solution& sol : HprRuns(3, IndicatorMode::kExpectation)) {
    if (!sol.solved()) continue;
    EXPECT_EQ(sol.solves, 1);
    EXPECT_EQ(sol.omega_reached, 64);
  }
}

TEST(KktResidual, PerturbedWeightIncreasesResidual) {
  const AugmentedGame game = HogPoacherRanger({}, ConstraintSetup::Chance(0.8));
  for (Solution sol : HprRuns(3)) {
    if (!sol.solved()) continue;
    const double base = KktResidual(game, sol, sol.omega_reached);
    sol.x[1][0] += 0.1;
    EXPECT_GT(KktResidual(game, sol, sol.omega_reached), base);
    return;
  }
  FAIL() << "no solved run";
}

TEST(KktResidual, DegenerateGameIsStationary) {
  AugmentedGame game = SingleQuadratic();
  game.strategy_counts = {3};
  JointFunction zero;
  zero.value = [](const Vector&) { return 0.0; };
  zero.gradient = [](const Vector&) { return Vector(Vector::Zero(1)); };
  zero.hessian = [](const Vector&) { return Matrix(Matrix::Zero(1, 1)); };
  game.costs = {zero};
  Solution sol;
  sol.x = {Vector::Constant(3, 1.0 / 3)};
  sol.s = {Matrix::Zero(3, 1)};
  sol.lambda = Vector::Zero(1);
  sol.gamma = Vector::Zero(0);
  EXPECT_NEAR(KktResidual(game, sol, 1.0), 0.0, 1e-15);
}

}  // namespace
}  // namespace ccg
