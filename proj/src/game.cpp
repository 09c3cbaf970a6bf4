#include "ccg/game.hpp"

#include <algorithm>
#include <cmath>

namespace ccg {

const char* ToString(IndicatorMode mode) {
  return mode == IndicatorMode::kChance ? "chance" : "expectation";
}

void IndicatorConfig::Validate() const {
  if (mode == IndicatorMode::kChance && !(omega > 0.0 && std::isfinite(omega))) {
    throw ConfigurationError("chance indicator needs a positive finite omega");
  }
}

double Sigmoid(double v) {
  v = std::clamp(v, -500.0, 500.0);
  return 1.0 / (1.0 + std::exp(-v));
}

double IndicatorApply(const IndicatorConfig& cfg, double g) {
  if (cfg.mode == IndicatorMode::kExpectation) return g;
  return Sigmoid(cfg.omega * g);
}

double IndicatorDerivative(const IndicatorConfig& cfg, double g) {
  if (cfg.mode == IndicatorMode::kExpectation) return 1.0;
  const double s = Sigmoid(cfg.omega * g);
  return cfg.omega * s * (1.0 - s);
}

double IndicatorSecondDerivative(const IndicatorConfig& cfg, double g) {
  if (cfg.mode == IndicatorMode::kExpectation) return 0.0;
  const double s = Sigmoid(cfg.omega * g);
  return cfg.omega * cfg.omega * s * (1.0 - s) * (1.0 - 2.0 * s);
}

ConstraintSpec ConstraintSpec::Shared(std::size_t id, std::vector<std::size_t> owners,
                                      double threshold) {
  ConstraintSpec spec;
  spec.id = id;
  spec.thresholds.assign(owners.size(), threshold);
  spec.owners = std::move(owners);
  return spec;
}

bool ConstraintSpec::IsOwnedBy(std::size_t player) const {
  return std::find(owners.begin(), owners.end(), player) != owners.end();
}

double ConstraintSpec::ThresholdFor(std::size_t player) const {
  const auto it = std::find(owners.begin(), owners.end(), player);
  if (it == owners.end()) {
    throw std::out_of_range("player " + std::to_string(player) + " does not own constraint " +
                            std::to_string(id));
  }
  return thresholds[static_cast<std::size_t>(it - owners.begin())];
}

void ConstraintSpec::Validate(std::size_t num_players, IndicatorMode mode) const {
  const std::string where = "constraint " + std::to_string(id) + ": ";
  if (owners.empty()) throw ConfigurationError(where + "owner set is empty");
  if (thresholds.size() != owners.size()) {
    throw ConfigurationError(where + "needs one threshold per owner");
  }
  for (std::size_t k = 0; k < owners.size(); ++k) {
    if (owners[k] >= num_players) throw ConfigurationError(where + "owner out of range");
    if (std::count(owners.begin(), owners.end(), owners[k]) > 1) {
      throw ConfigurationError(where + "duplicate owner");
    }
    if (!std::isfinite(thresholds[k])) throw ConfigurationError(where + "non-finite threshold");
    if (mode == IndicatorMode::kChance && (thresholds[k] < 0.0 || thresholds[k] > 1.0)) {
      throw ConfigurationError(where + "chance thresholds must lie in [0, 1]");
    }
  }
}

std::vector<std::size_t> TensorGame::strategy_counts() const {
  if (costs.empty()) return {};
  return costs.front().shape();
}

const TensorConstraint& TensorGame::constraint(std::size_t id) const {
  for (const TensorConstraint& c : constraints) {
    if (c.spec.id == id) return c;
  }
  throw std::out_of_range("no constraint with id " + std::to_string(id));
}

std::vector<std::size_t> TensorGame::OwnedConstraints(std::size_t player) const {
  std::vector<std::size_t> owned;
  for (std::size_t j = 0; j < constraints.size(); ++j) {
    if (constraints[j].spec.IsOwnedBy(player)) owned.push_back(j);
  }
  return owned;
}

void TensorGame::Validate() const {
  if (costs.empty()) throw ConfigurationError("game has no players");
  const auto shape = costs.front().shape();
  if (shape.size() != costs.size()) {
    throw ShapeError("cost tensors need one axis per player");
  }
  for (const DenseTensor& a : costs) {
    if (a.shape() != shape) throw ShapeError("cost tensors disagree in shape");
  }
  for (const TensorConstraint& c : constraints) {
    c.spec.Validate(num_players(), mode);
    if (c.q.shape() != shape) throw ShapeError("constraint tensor shape differs from cost shape");
    if (mode == IndicatorMode::kChance) {
      for (double v : c.q.data()) {
        if (!(v >= 0.0 && v <= 1.0)) {
          throw ConfigurationError("chance-mode constraint entries must lie in [0, 1]");
        }
      }
    }
  }
}

void ValidateMixProfile(const MixProfile& x, const std::vector<std::size_t>& counts,
                        double tolerance) {
  if (x.size() != counts.size()) throw ShapeError("mix profile has wrong player count");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (static_cast<std::size_t>(x[i].size()) != counts[i]) {
      throw ShapeError("mix vector " + std::to_string(i) + " has wrong length");
    }
    if ((x[i].array() < -tolerance).any() || std::abs(x[i].sum() - 1.0) > tolerance) {
      throw std::invalid_argument("mix vector " + std::to_string(i) + " is not on the simplex");
    }
  }
}

StrategyBox StrategyBox::Cube(Eigen::Index dim, double lo, double hi) {
  return {Vector::Constant(dim, lo), Vector::Constant(dim, hi)};
}

bool StrategyBox::Contains(const Vector& point, double slack) const {
  return point.size() == lower.size() && (point.array() >= lower.array() - slack).all() &&
         (point.array() <= upper.array() + slack).all();
}

Eigen::Index AugmentedGame::joint_dim() const {
  Eigen::Index total = 0;
  for (Eigen::Index d : dims) total += d;
  return total;
}

Eigen::Index AugmentedGame::joint_offset(std::size_t player) const {
  Eigen::Index offset = 0;
  for (std::size_t p = 0; p < player; ++p) offset += dims[p];
  return offset;
}

std::vector<std::size_t> AugmentedGame::OwnedConstraints(std::size_t player) const {
  std::vector<std::size_t> owned;
  for (std::size_t j = 0; j < constraints.size(); ++j) {
    if (constraints[j].spec.IsOwnedBy(player)) owned.push_back(j);
  }
  return owned;
}

void AugmentedGame::Validate() const {
  const std::size_t n = num_players();
  if (n == 0 || n > kMaxAxes) throw ConfigurationError("player count must be in [1, 8]");
  if (dims.size() != n || costs.size() != n || boxes.size() != n) {
    throw ConfigurationError("per-player arrays disagree with the player count");
  }
  indicator.Validate();
  for (std::size_t i = 0; i < n; ++i) {
    if (strategy_counts[i] == 0) throw ConfigurationError("every player needs a strategy");
    if (dims[i] < 1) throw ConfigurationError("strategy dimension must be positive");
    if (!costs[i].value) throw ConfigurationError("missing cost function");
    const StrategyBox& box = boxes[i];
    if (box.lower.size() != dims[i] || box.upper.size() != dims[i]) {
      throw ConfigurationError("strategy box dimension mismatch");
    }
    if (!box.lower.allFinite() || !box.upper.allFinite() ||
        !(box.lower.array() < box.upper.array()).all()) {
      throw ConfigurationError("strategy boxes need finite lower < upper");
    }
  }
  for (const ConstraintFunction& c : constraints) {
    c.spec.Validate(n, indicator.mode);
    if (!c.g.value) throw ConfigurationError("missing constraint function");
  }
}

void AugmentedGame::ValidateStrategies(const StrategyProfile& s, double slack) const {
  if (s.size() != num_players()) throw ShapeError("strategy profile has wrong player count");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (static_cast<std::size_t>(s[i].rows()) != strategy_counts[i] || s[i].cols() != dims[i]) {
      throw ShapeError("strategies of player " + std::to_string(i) + " have wrong shape");
    }
    for (Eigen::Index k = 0; k < s[i].rows(); ++k) {
      if (!boxes[i].Contains(s[i].row(k).transpose(), slack)) {
        throw std::invalid_argument("strategy " + std::to_string(k) + " of player " +
                                    std::to_string(i) + " lies outside its box");
      }
    }
  }
}

TensorGame Lift(const AugmentedGame& game, const StrategyProfile& s) {
  return Lift(game, s, game.indicator);
}

TensorGame Lift(const AugmentedGame& game, const StrategyProfile& s,
                const IndicatorConfig& indicator) {
  if (s.size() != game.num_players()) throw ShapeError("strategy profile has wrong player count");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (static_cast<std::size_t>(s[i].rows()) != game.strategy_counts[i] ||
        s[i].cols() != game.dims[i]) {
      throw ShapeError("strategies of player " + std::to_string(i) + " have wrong shape");
    }
  }
  TensorGame out;
  out.mode = indicator.mode;
  for (const JointFunction& f : game.costs) out.costs.push_back(FillFrom(f.value, s));
  for (const ConstraintFunction& c : game.constraints) {
    const auto& g = c.g.value;
    out.constraints.push_back(
        {c.spec, FillFrom([&](const Vector& joint) { return IndicatorApply(indicator, g(joint)); },
                          s)});
  }
  return out;
}

double ConstraintSatisfaction(const TensorGame& game, const MixProfile& x, std::size_t id) {
  return FullContract(game.constraint(id).q, x);
}

}  // namespace ccg
