#pragma once

#include <functional>
#include <vector>

#include "ccg/game.hpp"

namespace ccg {

struct Segment {
  Eigen::Index offset = 0;
  Eigen::Index length = 0;
};

// Position of every primal and dual block inside the flat MCP vector z:
//   [x_1 .. x_N | s_1 .. s_N | lambda_1 .. lambda_N | gamma_(i,j) ...]
// Strategy blocks exist only for augmented games; s_i stores player i's
// strategies row by row. Constraint duals are ordered by player, then by
// constraint position.
struct VariableLayout {
  struct DualSlot {
    std::size_t player = 0;
    std::size_t constraint = 0;  // position in the game's constraint list
    Eigen::Index index = 0;
  };

  std::vector<Segment> weights;
  std::vector<Segment> strategies;
  std::vector<Eigen::Index> dims;  // strategy dimension per player (augmented only)
  std::vector<Eigen::Index> simplex_duals;
  std::vector<DualSlot> constraint_duals;
  Eigen::Index size = 0;

  bool augmented() const { return !strategies.empty(); }

  static VariableLayout ForTensorGame(const TensorGame& game);
  static VariableLayout ForAugmentedGame(const AugmentedGame& game);

  MixProfile Weights(const Vector& z) const;
  StrategyProfile Strategies(const Vector& z) const;
  Vector SimplexDuals(const Vector& z) const;
  Vector ConstraintDuals(const Vector& z) const;

  // Inverse of the accessors above. Strategies are ignored for weight-only
  // layouts.
  Vector Pack(const MixProfile& x, const StrategyProfile& s, const Vector& lambda,
              const Vector& gamma) const;
};

// Box-constrained mixed complementarity problem F(z) _|_ lower <= z <= upper.
struct MCPInstance {
  Eigen::Index n = 0;
  Vector lower;
  Vector upper;
  std::function<Vector(const Vector&)> residual;
  std::function<Matrix(const Vector&)> jacobian;
  VariableLayout layout;

  void Validate() const;
};

// KKT system of a tensor game over mixing weights only.
MCPInstance AssembleWeightMCP(const TensorGame& game);

// KKT system of a strategy-augmented game at strictness omega. Requires
// analytic gradients and Hessians for every cost and constraint function.
MCPInstance AssembleAugmentedMCP(const AugmentedGame& game, double omega);

}  // namespace ccg
