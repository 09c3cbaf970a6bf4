#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ccg/tensor.hpp"

namespace ccg {

class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// How raw constraint values g(s) become constraint tensor entries.
//   chance:      sigma(omega * g), a softened feasibility indicator
//   expectation: g itself
enum class IndicatorMode { kChance, kExpectation };

const char* ToString(IndicatorMode mode);

struct IndicatorConfig {
  IndicatorMode mode = IndicatorMode::kChance;
  double omega = 1.0;  // strictness; ignored in expectation mode

  static IndicatorConfig Chance(double omega) { return {IndicatorMode::kChance, omega}; }
  static IndicatorConfig Expectation() { return {IndicatorMode::kExpectation, 1.0}; }

  IndicatorConfig WithOmega(double w) const { return {mode, w}; }
  void Validate() const;
};

// Logistic function with the argument clamped to +-500.
double Sigmoid(double v);

double IndicatorApply(const IndicatorConfig& cfg, double g);
// First and second derivatives of IndicatorApply in g.
double IndicatorDerivative(const IndicatorConfig& cfg, double g);
double IndicatorSecondDerivative(const IndicatorConfig& cfg, double g);

// Constraint j and the players that respect it, each with its own threshold.
struct ConstraintSpec {
  std::size_t id = 0;
  std::vector<std::size_t> owners;
  std::vector<double> thresholds;  // parallel to owners

  // Every owner uses the same threshold.
  static ConstraintSpec Shared(std::size_t id, std::vector<std::size_t> owners, double threshold);

  bool IsOwnedBy(std::size_t player) const;
  double ThresholdFor(std::size_t player) const;
  void Validate(std::size_t num_players, IndicatorMode mode) const;
};

struct TensorConstraint {
  ConstraintSpec spec;
  DenseTensor q;
};

// Mixed-strategy game over fixed cost tensors with tensor constraints
// q[.]x >= threshold for each owner.
struct TensorGame {
  IndicatorMode mode = IndicatorMode::kChance;
  std::vector<DenseTensor> costs;  // one per player
  std::vector<TensorConstraint> constraints;

  std::size_t num_players() const { return costs.size(); }
  std::vector<std::size_t> strategy_counts() const;
  const TensorConstraint& constraint(std::size_t id) const;

  // Constraint positions owned by a player, in list order.
  std::vector<std::size_t> OwnedConstraints(std::size_t player) const;

  void Validate() const;
};

// Per-player mixing weights; each entry lies on a probability simplex.
using MixProfile = VectorList;

// Per-player pure strategies; row k of entry i is player i's k-th strategy.
using StrategyProfile = std::vector<Matrix>;

void ValidateMixProfile(const MixProfile& x, const std::vector<std::size_t>& counts,
                        double tolerance = 1e-8);

// Scalar function of a joint pure strategy (all players' points concatenated)
// together with its derivatives over the concatenated coordinates.
struct JointFunction {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::function<Matrix(const Vector&)> hessian;

  bool HasDerivatives() const { return gradient && hessian; }
};

struct StrategyBox {
  Vector lower;
  Vector upper;

  static StrategyBox Cube(Eigen::Index dim, double lo, double hi);
  bool Contains(const Vector& point, double slack = 1e-8) const;
};

struct ConstraintFunction {
  ConstraintSpec spec;
  JointFunction g;
  // Distance the constraint keeps bounded below (e.g. poacher to ranger);
  // used by evaluation reports. Optional.
  std::function<double(const Vector&)> distance;
};

// Game whose cost and constraint tensors are generated from continuous pure
// strategies, which are decision variables alongside the mixing weights.
struct AugmentedGame {
  std::vector<std::size_t> strategy_counts;  // m_i
  std::vector<Eigen::Index> dims;            // d_i
  std::vector<JointFunction> costs;          // f_i
  std::vector<ConstraintFunction> constraints;
  IndicatorConfig indicator;
  std::vector<StrategyBox> boxes;
  std::string name;

  std::size_t num_players() const { return strategy_counts.size(); }
  Eigen::Index joint_dim() const;
  Eigen::Index joint_offset(std::size_t player) const;
  std::vector<std::size_t> OwnedConstraints(std::size_t player) const;

  void Validate() const;
  void ValidateStrategies(const StrategyProfile& s, double slack = 1e-8) const;
};

// Evaluates costs and indicator-mapped constraints on every joint strategy.
TensorGame Lift(const AugmentedGame& game, const StrategyProfile& s);
TensorGame Lift(const AugmentedGame& game, const StrategyProfile& s,
                const IndicatorConfig& indicator);

// q_j[.]x for the constraint with the given id.
double ConstraintSatisfaction(const TensorGame& game, const MixProfile& x, std::size_t id);

}  // namespace ccg
