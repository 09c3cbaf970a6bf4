#include "ccg/scenarios.hpp"

namespace ccg {
namespace {

constexpr Eigen::Index kPlane = 2;

void CheckBox(double lo, double hi) {
  if (!(lo < hi)) throw ConfigurationError("strategy box must satisfy lower < upper");
}

AugmentedGame PlanarGame(std::vector<std::size_t> counts, double lo, double hi,
                         const ConstraintSetup& setup) {
  AugmentedGame game;
  game.dims.assign(counts.size(), kPlane);
  game.boxes.assign(counts.size(), StrategyBox::Cube(kPlane, lo, hi));
  game.strategy_counts = std::move(counts);
  game.indicator = setup.indicator;
  return game;
}

std::function<double(const Vector&)> PairDistance(std::size_t a, std::size_t b) {
  return [a, b](const Vector& joint) {
    return (joint.segment<kPlane>(kPlane * static_cast<Eigen::Index>(a)) -
            joint.segment<kPlane>(kPlane * static_cast<Eigen::Index>(b)))
        .norm();
  };
}

}  // namespace

void HprParams::Validate() const {
  if (!(radius > 0.0)) throw ConfigurationError("radius must be positive");
  CheckBox(box_lower, box_upper);
  if (strategy_counts.size() != 3) throw ConfigurationError("hog-poacher-ranger has 3 players");
  for (std::size_t m : strategy_counts) {
    if (m == 0) throw ConfigurationError("strategy counts must be positive");
  }
}

void ChainParams::Validate() const {
  if (num_players < 2) throw ConfigurationError("chain needs at least 2 players");
  if (num_players > kMaxAxes) throw ConfigurationError("chain supports at most 8 players");
  if (strategy_count < 1) throw ConfigurationError("strategy count must be positive");
  if (!(radius > 0.0)) throw ConfigurationError("radius must be positive");
  CheckBox(box_lower, box_upper);
}

void StationaryHogParams::Validate() const {
  if (!(radius > 0.0)) throw ConfigurationError("radius must be positive");
  CheckBox(box_lower, box_upper);
  if (poacher_strategies == 0 || ranger_strategies == 0) {
    throw ConfigurationError("strategy counts must be positive");
  }
}

JointFunction PairSquaredDistance(std::size_t num_players, std::size_t a, std::size_t b,
                                  double scale, double offset) {
  const Eigen::Index dim = kPlane * static_cast<Eigen::Index>(num_players);
  const Eigen::Index ia = kPlane * static_cast<Eigen::Index>(a);
  const Eigen::Index ib = kPlane * static_cast<Eigen::Index>(b);
  Matrix hessian = Matrix::Zero(dim, dim);
  const Matrix block = 2.0 * scale * Matrix::Identity(kPlane, kPlane);
  hessian.block(ia, ia, kPlane, kPlane) += block;
  hessian.block(ib, ib, kPlane, kPlane) += block;
  hessian.block(ia, ib, kPlane, kPlane) -= block;
  hessian.block(ib, ia, kPlane, kPlane) -= block;

  JointFunction f;
  f.value = [=](const Vector& joint) {
    return scale * (joint.segment<kPlane>(ia) - joint.segment<kPlane>(ib)).squaredNorm() + offset;
  };
  f.gradient = [=](const Vector& joint) {
    Vector grad = Vector::Zero(dim);
    const Eigen::Vector2d diff = joint.segment<kPlane>(ia) - joint.segment<kPlane>(ib);
    grad.segment<kPlane>(ia) = 2.0 * scale * diff;
    grad.segment<kPlane>(ib) = -2.0 * scale * diff;
    return grad;
  };
  f.hessian = [hessian](const Vector&) { return hessian; };
  return f;
}

JointFunction AnchorSquaredDistance(std::size_t num_players, std::size_t a, const Vector& anchor,
                                    double scale) {
  const Eigen::Index dim = kPlane * static_cast<Eigen::Index>(num_players);
  const Eigen::Index ia = kPlane * static_cast<Eigen::Index>(a);
  Matrix hessian = Matrix::Zero(dim, dim);
  hessian.block(ia, ia, kPlane, kPlane) = 2.0 * scale * Matrix::Identity(kPlane, kPlane);
  const Eigen::Vector2d center = anchor;

  JointFunction f;
  f.value = [=](const Vector& joint) {
    return scale * (joint.segment<kPlane>(ia) - center).squaredNorm();
  };
  f.gradient = [=](const Vector& joint) {
    Vector grad = Vector::Zero(dim);
    grad.segment<kPlane>(ia) = 2.0 * scale * (joint.segment<kPlane>(ia) - center);
    return grad;
  };
  f.hessian = [hessian](const Vector&) { return hessian; };
  return f;
}

AugmentedGame HogPoacherRanger(const HprParams& params, const ConstraintSetup& setup) {
  params.Validate();
  AugmentedGame game =
      PlanarGame(params.strategy_counts, params.box_lower, params.box_upper, setup);
  game.name = "hpr";
  game.costs = {PairSquaredDistance(3, 0, 1, -1.0), PairSquaredDistance(3, 0, 1, 1.0),
                PairSquaredDistance(3, 1, 2, 1.0)};
  ConstraintFunction collision;
  collision.spec = ConstraintSpec::Shared(0, {1}, setup.epsilon);
  collision.g = PairSquaredDistance(3, 1, 2, 1.0, -params.radius * params.radius);
  collision.distance = PairDistance(1, 2);
  game.constraints.push_back(std::move(collision));
  game.Validate();
  return game;
}

AugmentedGame NPlayerChain(const ChainParams& params, const ConstraintSetup& setup) {
  params.Validate();
  const std::size_t n = params.num_players;
  AugmentedGame game = PlanarGame(std::vector<std::size_t>(n, params.strategy_count),
                                  params.box_lower, params.box_upper, setup);
  game.name = "chain";
  game.costs.push_back(PairSquaredDistance(n, 0, 1, -1.0));
  for (std::size_t i = 1; i < n; ++i) game.costs.push_back(PairSquaredDistance(n, i - 1, i, 1.0));
  for (std::size_t i = 1; i + 1 < n; ++i) {
    ConstraintFunction c;
    c.spec = ConstraintSpec::Shared(i - 1, {i}, setup.epsilon);
    c.g = PairSquaredDistance(n, i, i + 1, 1.0, -params.radius * params.radius);
    c.distance = PairDistance(i, i + 1);
    game.constraints.push_back(std::move(c));
  }
  game.Validate();
  return game;
}

AugmentedGame StationaryHogVariant(const StationaryHogParams& params,
                                   const ConstraintSetup& setup) {
  params.Validate();
  AugmentedGame game = PlanarGame({params.poacher_strategies, params.ranger_strategies},
                                  params.box_lower, params.box_upper, setup);
  game.name = "stationary_hog";
  const Vector hog = Eigen::Vector2d(params.hog_x, params.hog_y);
  game.costs = {AnchorSquaredDistance(2, 0, hog, 1.0), PairSquaredDistance(2, 0, 1, 1.0)};
  ConstraintFunction collision;
  collision.spec = ConstraintSpec::Shared(0, {0}, setup.epsilon);
  collision.g = PairSquaredDistance(2, 0, 1, 1.0, -params.radius * params.radius);
  collision.distance = PairDistance(0, 1);
  game.constraints.push_back(std::move(collision));
  game.Validate();
  return game;
}

}  // namespace ccg
