#include <cmath>

#include <gtest/gtest.h>

#include "ccg/game.hpp"
#include "ccg/scenarios.hpp"
#include "test_util.hpp"

namespace ccg {
namespace {

Matrix Points(std::initializer_list<std::pair<double, double>> pts) {
  Matrix m(static_cast<Eigen::Index>(pts.size()), 2);
  Eigen::Index r = 0;
  for (const auto& [a, b] : pts) m.row(r++) << a, b;
  return m;
}

AugmentedGame Hpr(std::vector<std::size_t> counts = {2, 2, 2},
                  ConstraintSetup setup = ConstraintSetup::Chance(0.8)) {
  HprParams p;
  p.strategy_counts = std::move(counts);
  return HogPoacherRanger(p, setup);
}

TEST(Indicator, SpecExamples) {
  EXPECT_DOUBLE_EQ(IndicatorApply(IndicatorConfig::Chance(3.0), 0.0), 0.5);
  EXPECT_NEAR(IndicatorApply(IndicatorConfig::Chance(64.0), 0.2), 1.0 / (1.0 + std::exp(-12.8)),
              1e-15);
  EXPECT_NEAR(IndicatorApply(IndicatorConfig::Chance(64.0), 0.2), 0.9999972, 1e-7);
  EXPECT_EQ(IndicatorApply(IndicatorConfig::Expectation(), -3.7), -3.7);
}

TEST(Indicator, ClampsExtremeArguments) {
  const IndicatorConfig cfg = IndicatorConfig::Chance(1e6);
  EXPECT_TRUE(std::isfinite(IndicatorApply(cfg, -1e3)));
  EXPECT_TRUE(std::isfinite(IndicatorDerivative(cfg, -1e3)));
  EXPECT_TRUE(std::isfinite(IndicatorSecondDerivative(cfg, 1e3)));
  EXPECT_THROW(IndicatorConfig::Chance(0.0).Validate(), ConfigurationError);
}

TEST(Indicator, DerivativesMatchFiniteDifferences) {
  Rng rng(21);
  for (int rep = 0; rep < 100; ++rep) {
    const IndicatorConfig cfg = IndicatorConfig::Chance(UniformIn(rng, 0.5, 64.0));
    const double g = UniformIn(rng, -0.2, 0.2);
    const Vector at = Vector::Constant(1, g);
    const auto value = [&](const Vector& v) { return IndicatorApply(cfg, v[0]); };
    const auto slope = [&](const Vector& v) { return IndicatorDerivative(cfg, v[0]); };
    const Vector d1 = testing::NumericGradient(value, at, 1e-7);
    const Vector d2 = testing::NumericGradient(slope, at, 1e-7);
    EXPECT_LE(testing::RelativeError(Vector::Constant(1, IndicatorDerivative(cfg, g)), d1), 1e-5);
    EXPECT_LE(testing::RelativeError(Vector::Constant(1, IndicatorSecondDerivative(cfg, g)), d2),
              1e-5);
  }
  EXPECT_EQ(IndicatorDerivative(IndicatorConfig::Expectation(), 4.0), 1.0);
  EXPECT_EQ(IndicatorSecondDerivative(IndicatorConfig::Expectation(), 4.0), 0.0);
}

TEST(Lift, HogPoacherRangerHandEvaluation) {
  const AugmentedGame game = Hpr({1, 1, 1});
  const StrategyProfile s = {Points({{0, 0}}), Points({{1, 0}}), Points({{1, 0}})};
  const TensorGame chance = Lift(game, s, IndicatorConfig::Chance(1.0));
  EXPECT_DOUBLE_EQ(chance.costs[0][0], -1.0);
  EXPECT_DOUBLE_EQ(chance.costs[1][0], 1.0);
  EXPECT_DOUBLE_EQ(chance.costs[2][0], 0.0);
  EXPECT_NEAR(chance.constraints[0].q[0], 0.2689414213699951, 1e-15);
  EXPECT_EQ(chance.constraints[0].spec.owners, std::vector<std::size_t>{1});
  EXPECT_EQ(chance.constraints[0].spec.ThresholdFor(1), 0.8);

  const TensorGame expectation = Lift(game, s, IndicatorConfig::Expectation());
  EXPECT_DOUBLE_EQ(expectation.constraints[0].q[0], -1.0);
  EXPECT_EQ(expectation.mode, IndicatorMode::kExpectation);
}

TEST(Lift, ChanceEntriesStayInUnitInterval) {
  Rng rng(22);
  const AugmentedGame game = Hpr({3, 2, 4});
  for (int rep = 0; rep < 50; ++rep) {
    const TensorGame t = Lift(game, testing::RandomStrategies(rng, game),
                              IndicatorConfig::Chance(UniformIn(rng, 0.1, 100.0)));
    for (double q : t.constraints[0].q.data()) {
      EXPECT_GE(q, 0.0);
      EXPECT_LE(q, 1.0);
    }
    EXPECT_NO_THROW(t.Validate());
  }
}

TEST(Lift, RejectsWrongStrategyShape) {
  const AugmentedGame game = Hpr();
  StrategyProfile s = {Points({{0, 0}, {1, 1}}), Points({{0, 0}, {1, 1}})};
  EXPECT_THROW(Lift(game, s), ShapeError);
  s.push_back(Matrix::Zero(2, 3));
  EXPECT_THROW(Lift(game, s), ShapeError);
}

TEST(ConstraintSatisfaction, SpecExamples) {
  TensorGame game;
  game.costs = {DenseTensor({2, 2}), DenseTensor({2, 2})};
  game.constraints.push_back({ConstraintSpec::Shared(0, {0}, 0.5), DenseTensor::Constant({2, 2}, 1.0)});
  game.constraints.push_back({ConstraintSpec::Shared(4, {1}, 0.5), DenseTensor({2, 2}, {1, 0, 0, 1})});
  game.Validate();
  Rng rng(1);
  EXPECT_NEAR(ConstraintSatisfaction(game, testing::RandomMix(rng, {2, 2}), 0), 1.0, 1e-15);
  const MixProfile half = {Vector::Constant(2, 0.5), Vector::Constant(2, 0.5)};
  EXPECT_DOUBLE_EQ(ConstraintSatisfaction(game, half, 4), 0.5);
  EXPECT_THROW(ConstraintSatisfaction(game, half, 2), std::out_of_range);
}

TEST(ConstraintSatisfaction, MatchesEnumeration) {
  Rng rng(23);
  for (const std::vector<std::size_t>& shape :
       {std::vector<std::size_t>{4}, {2, 3}, {4, 4, 1}, {3, 2, 4, 2}}) {
    TensorGame game;
    for (std::size_t i = 0; i < shape.size(); ++i) game.costs.push_back(DenseTensor(shape));
    game.constraints.push_back(
        {ConstraintSpec::Shared(0, {0}, 0.2), testing::RandomTensor(rng, shape, 0.0, 1.0)});
    const MixProfile x = testing::RandomMix(rng, shape);
    double oracle = 0.0;
    testing::EnumerateJoint(shape, [&](const std::vector<std::size_t>& k) {
      oracle += testing::JointProbability(x, k) * game.constraints[0].q.at(k);
    });
    EXPECT_NEAR(ConstraintSatisfaction(game, x, 0), oracle, 1e-12);
  }
}

TEST(GameValidation, RejectsMalformedGames) {
  TensorGame game;
  game.costs = {DenseTensor({2, 2}), DenseTensor({2, 3})};
  EXPECT_THROW(game.Validate(), ShapeError);

  game.costs = {DenseTensor({2, 2}), DenseTensor({2, 2})};
  game.constraints.push_back({ConstraintSpec::Shared(0, {0}, 0.5), DenseTensor::Constant({2, 2}, 2.0)});
  EXPECT_THROW(game.Validate(), ConfigurationError);
  game.mode = IndicatorMode::kExpectation;
  EXPECT_NO_THROW(game.Validate());

  EXPECT_THROW(ConstraintSpec::Shared(0, {}, 0.5).Validate(2, IndicatorMode::kChance),
               ConfigurationError);
  EXPECT_THROW(ConstraintSpec::Shared(0, {0}, 1.5).Validate(2, IndicatorMode::kChance),
               ConfigurationError);
  EXPECT_NO_THROW(ConstraintSpec::Shared(0, {0}, 1.5).Validate(2, IndicatorMode::kExpectation));
  EXPECT_THROW(ConstraintSpec::Shared(0, {3}, 0.5).Validate(2, IndicatorMode::kChance),
               ConfigurationError);
}

TEST(GameValidation, MixProfiles) {
  EXPECT_NO_THROW(ValidateMixProfile({Vector::Constant(2, 0.5)}, {2}));
  EXPECT_THROW(ValidateMixProfile({Vector::Constant(2, 0.6)}, {2}), std::invalid_argument);
  EXPECT_THROW(ValidateMixProfile({Vector::Constant(3, 1.0 / 3)}, {2}), ShapeError);
}

TEST(Scenarios, HogPoacherRangerValues) {
  const AugmentedGame game = Hpr();
  Vector joint(6);
  joint << 0, 0, 1, 0, 1, 0;
  EXPECT_DOUBLE_EQ(game.costs[0].value(joint), -1.0);
  EXPECT_DOUBLE_EQ(game.costs[1].value(joint), 1.0);
  EXPECT_DOUBLE_EQ(game.constraints[0].g.value(joint), -1.0);
  EXPECT_EQ(game.OwnedConstraints(1), std::vector<std::size_t>{0});
  EXPECT_TRUE(game.OwnedConstraints(0).empty());
  EXPECT_TRUE(game.OwnedConstraints(2).empty());
}

TEST(Scenarios, HogPoacherPairIsZeroSum) {
  Rng rng(24);
  const AugmentedGame game = Hpr();
  for (int rep = 0; rep < 100; ++rep) {
    const Vector joint = testing::RandomVector(rng, 6, -2, 2);
    EXPECT_EQ(game.costs[0].value(joint) + game.costs[1].value(joint), 0.0);
  }
}

TEST(Scenarios, ChainStructure) {
  ChainParams p;
  p.num_players = 3;
  const AugmentedGame chain = NPlayerChain(p, ConstraintSetup::Chance(0.8));
  const AugmentedGame hpr = Hpr();
  Rng rng(25);
  for (int rep = 0; rep < 50; ++rep) {
    const Vector joint = testing::RandomVector(rng, 6, -2, 2);
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_EQ(chain.costs[i].value(joint), hpr.costs[i].value(joint));
    }
    EXPECT_EQ(chain.constraints[0].g.value(joint), hpr.constraints[0].g.value(joint));
  }
  EXPECT_EQ(chain.constraints[0].spec.owners, hpr.constraints[0].spec.owners);

  p.num_players = 5;
  const AugmentedGame five = NPlayerChain(p, ConstraintSetup::Chance(0.8));
  ASSERT_EQ(five.constraints.size(), 3u);
  for (std::size_t c = 0; c < 3; ++c) {
    EXPECT_EQ(five.constraints[c].spec.owners, std::vector<std::size_t>{c + 1});
  }
  const Vector joint = testing::RandomVector(rng, 10, -2, 2);
  for (std::size_t i = 1; i < 5; ++i) {
    const Vector d = joint.segment(2 * i, 2) - joint.segment(2 * (i - 1), 2);
    EXPECT_NEAR(five.costs[i].value(joint), d.squaredNorm(), 1e-14);
  }
  for (std::size_t c = 0; c < 3; ++c) {
    const Vector d = joint.segment(2 * (c + 1), 2) - joint.segment(2 * (c + 2), 2);
    EXPECT_NEAR(five.constraints[c].g.value(joint), d.squaredNorm() - 1.0, 1e-14);
    EXPECT_NEAR(five.constraints[c].distance(joint), d.norm(), 1e-14);
  }

  p.num_players = 1;
  EXPECT_THROW(NPlayerChain(p, ConstraintSetup::Chance(0.8)), ConfigurationError);
}

TEST(Scenarios, StationaryHogValues) {
  const AugmentedGame game = StationaryHogVariant({}, ConstraintSetup::Chance(0.5));
  EXPECT_EQ(game.strategy_counts, (std::vector<std::size_t>{3, 2}));
  Vector joint(4);
  joint << 1, 1, 1, 1;
  EXPECT_DOUBLE_EQ(game.costs[0].value(joint), 2.0);
  EXPECT_DOUBLE_EQ(game.constraints[0].g.value(joint), -1.0);
  joint << 1, 1, 1, 3;
  EXPECT_DOUBLE_EQ(game.constraints[0].g.value(joint), 3.0);
  EXPECT_EQ(game.constraints[0].spec.owners, std::vector<std::size_t>{0});
}

// Gradients and Hessians of every scenario cost and constraint.
void CheckScenarioDerivatives(const AugmentedGame& game, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<const JointFunction*> fns;
  for (const auto& f : game.costs) fns.push_back(&f);
  for (const auto& c : game.constraints) fns.push_back(&c.g);
  for (int rep = 0; rep < 100; ++rep) {
    const Vector joint = testing::RandomVector(rng, game.joint_dim(), -2, 2);
    for (const JointFunction* f : fns) {
      EXPECT_LE(testing::RelativeError(f->gradient(joint), testing::NumericGradient(f->value, joint)),
                1e-6);
      EXPECT_LE(testing::RelativeError(f->hessian(joint),
                                       testing::NumericJacobian(f->gradient, joint)),
                1e-6);
    }
  }
}

TEST(Scenarios, DerivativesMatchFiniteDifferences) {
  CheckScenarioDerivatives(Hpr(), 26);
  ChainParams p;
  p.num_players = 5;
  CheckScenarioDerivatives(NPlayerChain(p, ConstraintSetup::Chance(0.8)), 27);
  StationaryHogParams sp;
  sp.hog_x = 0.3;
  sp.hog_y = -0.7;
  CheckScenarioDerivatives(StationaryHogVariant(sp, ConstraintSetup::Chance(0.5)), 28);
}

}  // namespace
}  // namespace ccg
