#pragma once

#include <cstddef>
#include <vector>

#include "ccg/game.hpp"

namespace ccg {

// How the collision constraint of a scenario is imposed.
struct ConstraintSetup {
  IndicatorConfig indicator = IndicatorConfig::Chance(1.0);
  double epsilon = 0.8;

  static ConstraintSetup Chance(double epsilon) { return {IndicatorConfig::Chance(1.0), epsilon}; }
  // Expected value of g must be nonnegative.
  static ConstraintSetup Expectation(double epsilon = 0.0) {
    return {IndicatorConfig::Expectation(), epsilon};
  }
};

// Three players in the plane: the hog flees the poacher, the poacher chases
// the hog while keeping at least `radius` from the ranger, the ranger chases
// the poacher.
struct HprParams {
  double radius = 1.0;
  double box_lower = -2.0;
  double box_upper = 2.0;
  std::vector<std::size_t> strategy_counts = {2, 2, 2};

  void Validate() const;
};

// Chain of N players: player 0 flees player 1, every later player chases its
// predecessor, and players 1..N-2 keep `radius` from their successor.
struct ChainParams {
  std::size_t num_players = 3;
  std::size_t strategy_count = 2;
  double radius = 1.0;
  double box_lower = -2.0;
  double box_upper = 2.0;

  void Validate() const;
};

// The hog is frozen at a fixed point and folded into the poacher's cost,
// leaving a two-player game between poacher (player 0) and ranger (player 1).
struct StationaryHogParams {
  double radius = 1.0;
  double box_lower = -2.0;
  double box_upper = 2.0;
  std::size_t poacher_strategies = 3;
  std::size_t ranger_strategies = 2;
  double hog_x = 0.0;
  double hog_y = 0.0;

  void Validate() const;
};

AugmentedGame HogPoacherRanger(const HprParams& params, const ConstraintSetup& setup);
AugmentedGame NPlayerChain(const ChainParams& params, const ConstraintSetup& setup);
AugmentedGame StationaryHogVariant(const StationaryHogParams& params, const ConstraintSetup& setup);

// Building blocks over planar players laid out consecutively in the joint
// vector. scale * ||p_a - p_b||^2 + offset.
JointFunction PairSquaredDistance(std::size_t num_players, std::size_t a, std::size_t b,
                                  double scale, double offset = 0.0);
// scale * ||p_a - anchor||^2.
JointFunction AnchorSquaredDistance(std::size_t num_players, std::size_t a, const Vector& anchor,
                                    double scale);

}  // namespace ccg
