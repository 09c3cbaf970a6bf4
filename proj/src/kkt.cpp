#include "ccg/kkt.hpp"

#include <limits>
#include <memory>

namespace ccg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void AddDuals(VariableLayout& layout, std::size_t num_players,
              const std::function<std::vector<std::size_t>(std::size_t)>& owned) {
  for (std::size_t i = 0; i < num_players; ++i) layout.simplex_duals.push_back(layout.size++);
  for (std::size_t i = 0; i < num_players; ++i) {
    for (std::size_t j : owned(i)) layout.constraint_duals.push_back({i, j, layout.size++});
  }
}

Vector BaseLower(const VariableLayout& layout) {
  Vector lower = Vector::Constant(layout.size, -kInf);
  for (const Segment& seg : layout.weights) lower.segment(seg.offset, seg.length).setZero();
  for (const auto& slot : layout.constraint_duals) lower[slot.index] = 0.0;
  return lower;
}

// Rows and Jacobian blocks shared by both assemblies: weight stationarity,
// simplex equalities and constraint complementarity, evaluated on fixed
// tensors. `jac` may be null.
void WeightBlocks(const TensorGame& game, const VariableLayout& layout, const Vector& z,
                  Vector& f, Matrix* jac) {
  const std::size_t n = game.num_players();
  const MixProfile x = layout.Weights(z);

  std::vector<std::vector<std::pair<std::size_t, double>>> owned(n);  // (constraint, gamma)
  for (const auto& slot : layout.constraint_duals) {
    owned[slot.player].emplace_back(slot.constraint, z[slot.index]);
  }

  for (std::size_t i = 0; i < n; ++i) {
    const Segment& xi = layout.weights[i];
    const double lambda = z[layout.simplex_duals[i]];
    Vector row = ContractExcept(game.costs[i], x, i);
    for (const auto& [j, gamma] : owned[i]) {
      row -= gamma * ContractExcept(game.constraints[j].q, x, i);
    }
    f.segment(xi.offset, xi.length) = row.array() - lambda;
    f[layout.simplex_duals[i]] = x[i].sum() - 1.0;

    if (!jac) continue;
    Matrix& J = *jac;
    for (std::size_t q = 0; q < n; ++q) {
      if (q == i) continue;
      const Segment& xq = layout.weights[q];
      Matrix block = ContractExceptPair(game.costs[i], x, i, q);
      for (const auto& [j, gamma] : owned[i]) {
        block -= gamma * ContractExceptPair(game.constraints[j].q, x, i, q);
      }
      J.block(xi.offset, xq.offset, xi.length, xq.length) += block;
    }
    J.block(xi.offset, layout.simplex_duals[i], xi.length, 1).array() -= 1.0;
    J.block(layout.simplex_duals[i], xi.offset, 1, xi.length).array() += 1.0;
  }

  for (const auto& slot : layout.constraint_duals) {
    const TensorConstraint& c = game.constraints[slot.constraint];
    f[slot.index] = FullContract(c.q, x) - c.spec.ThresholdFor(slot.player);
    if (!jac) continue;
    const Segment& xi = layout.weights[slot.player];
    Matrix& J = *jac;
    J.block(xi.offset, slot.index, xi.length, 1) -= ContractExcept(c.q, x, slot.player);
    for (std::size_t q = 0; q < n; ++q) {
      const Segment& xq = layout.weights[q];
      J.block(slot.index, xq.offset, 1, xq.length) += ContractExcept(c.q, x, q).transpose();
    }
  }
}

// Strategy-dependent rows and blocks of the augmented system, accumulated by
// enumerating joint pure strategies.
class AugmentedTerms {
 public:
  AugmentedTerms(const AugmentedGame& game, const VariableLayout& layout,
                 const IndicatorConfig& indicator)
      : game_(game), layout_(layout), indicator_(indicator) {}

  void Accumulate(const Vector& z, Vector& f, Matrix* jac) const {
    const std::size_t n = game_.num_players();
    const std::size_t num_constraints = game_.constraints.size();
    const MixProfile x = layout_.Weights(z);
    const StrategyProfile s = layout_.Strategies(z);
    const Eigen::Index dim = game_.joint_dim();

    std::vector<std::vector<std::pair<std::size_t, const VariableLayout::DualSlot*>>> owned(n);
    for (const auto& slot : layout_.constraint_duals) {
      owned[slot.player].emplace_back(slot.constraint, &slot);
    }
    std::vector<Eigen::Index> offsets(n);
    for (std::size_t p = 0; p < n; ++p) offsets[p] = game_.joint_offset(p);

    Vector joint(dim);
    std::vector<double> weight_excluding(n);
    std::vector<double> g_prime(num_constraints), g_second(num_constraints);
    std::vector<Vector> g_grad(num_constraints);
    std::vector<Matrix> g_hess(num_constraints);

    ForEachIndex(game_.strategy_counts, [&](const JointIndex& index, std::size_t) {
      for (std::size_t p = 0; p < n; ++p) {
        joint.segment(offsets[p], game_.dims[p]) =
            s[p].row(static_cast<Eigen::Index>(index[p])).transpose();
      }
      double weight = 1.0;
      for (std::size_t p = 0; p < n; ++p) {
        weight *= x[p][static_cast<Eigen::Index>(index[p])];
        double excl = 1.0;
        for (std::size_t q = 0; q < n; ++q) {
          if (q != p) excl *= x[q][static_cast<Eigen::Index>(index[q])];
        }
        weight_excluding[p] = excl;
      }

      for (std::size_t j = 0; j < num_constraints; ++j) {
        const JointFunction& g = game_.constraints[j].g;
        const double value = g.value(joint);
        g_prime[j] = IndicatorDerivative(indicator_, value);
        g_grad[j] = g.gradient(joint);
        if (jac) {
          g_second[j] = IndicatorSecondDerivative(indicator_, value);
          g_hess[j] = g.hessian(joint);
        }
      }

      for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Index di = game_.dims[i];
        const Eigen::Index row =
            layout_.strategies[i].offset + static_cast<Eigen::Index>(index[i]) * di;
        // Gradient of the per-joint Lagrangian term f_i - sum gamma rho(g_j).
        Vector grad = game_.costs[i].gradient(joint);
        for (const auto& [j, slot] : owned[i]) grad -= z[slot->index] * g_prime[j] * g_grad[j];

        f.segment(row, di) += weight * grad.segment(offsets[i], di);
        if (!jac) continue;
        Matrix& J = *jac;

        Matrix hess_rows = game_.costs[i].hessian(joint).middleRows(offsets[i], di);
        for (const auto& [j, slot] : owned[i]) {
          const double gamma = z[slot->index];
          hess_rows -= gamma * (g_second[j] * g_grad[j].segment(offsets[i], di) *
                                    g_grad[j].transpose() +
                                g_prime[j] * g_hess[j].middleRows(offsets[i], di));
          J.block(row, slot->index, di, 1) -=
              weight * g_prime[j] * g_grad[j].segment(offsets[i], di);
        }

        const Eigen::Index x_row =
            layout_.weights[i].offset + static_cast<Eigen::Index>(index[i]);
        for (std::size_t q = 0; q < n; ++q) {
          const Eigen::Index dq = game_.dims[q];
          const Eigen::Index x_col =
              layout_.weights[q].offset + static_cast<Eigen::Index>(index[q]);
          const Eigen::Index s_col =
              layout_.strategies[q].offset + static_cast<Eigen::Index>(index[q]) * dq;
          J.block(row, x_col, di, 1) += weight_excluding[q] * grad.segment(offsets[i], di);
          J.block(row, s_col, di, dq) += weight * hess_rows.middleCols(offsets[q], dq);
          J.block(x_row, s_col, 1, dq) +=
              weight_excluding[i] * grad.segment(offsets[q], dq).transpose();
        }
      }

      if (!jac) return;
      for (const auto& slot : layout_.constraint_duals) {
        const std::size_t j = slot.constraint;
        for (std::size_t q = 0; q < n; ++q) {
          const Eigen::Index dq = game_.dims[q];
          const Eigen::Index s_col =
              layout_.strategies[q].offset + static_cast<Eigen::Index>(index[q]) * dq;
          jac->block(slot.index, s_col, 1, dq) +=
              weight * g_prime[j] * g_grad[j].segment(offsets[q], dq).transpose();
        }
      }
    });
  }

 private:
  const AugmentedGame& game_;
  const VariableLayout& layout_;
  IndicatorConfig indicator_;
};

}  // namespace

VariableLayout VariableLayout::ForTensorGame(const TensorGame& game) {
  VariableLayout layout;
  for (std::size_t m : game.strategy_counts()) {
    layout.weights.push_back({layout.size, static_cast<Eigen::Index>(m)});
    layout.size += static_cast<Eigen::Index>(m);
  }
  AddDuals(layout, game.num_players(),
           [&](std::size_t i) { return game.OwnedConstraints(i); });
  return layout;
}

VariableLayout VariableLayout::ForAugmentedGame(const AugmentedGame& game) {
  VariableLayout layout;
  const std::size_t n = game.num_players();
  for (std::size_t i = 0; i < n; ++i) {
    const auto m = static_cast<Eigen::Index>(game.strategy_counts[i]);
    layout.weights.push_back({layout.size, m});
    layout.size += m;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto len = static_cast<Eigen::Index>(game.strategy_counts[i]) * game.dims[i];
    layout.strategies.push_back({layout.size, len});
    layout.dims.push_back(game.dims[i]);
    layout.size += len;
  }
  AddDuals(layout, n, [&](std::size_t i) { return game.OwnedConstraints(i); });
  return layout;
}

MixProfile VariableLayout::Weights(const Vector& z) const {
  MixProfile x;
  x.reserve(weights.size());
  for (const Segment& seg : weights) x.emplace_back(z.segment(seg.offset, seg.length));
  return x;
}

StrategyProfile VariableLayout::Strategies(const Vector& z) const {
  StrategyProfile s;
  for (std::size_t i = 0; i < strategies.size(); ++i) {
    const Segment& seg = strategies[i];
    const Eigen::Index d = dims[i];
    Matrix m(seg.length / d, d);
    for (Eigen::Index k = 0; k < m.rows(); ++k) {
      m.row(k) = z.segment(seg.offset + k * d, d).transpose();
    }
    s.push_back(std::move(m));
  }
  return s;
}

Vector VariableLayout::SimplexDuals(const Vector& z) const {
  Vector out(static_cast<Eigen::Index>(simplex_duals.size()));
  for (std::size_t i = 0; i < simplex_duals.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = z[simplex_duals[i]];
  }
  return out;
}

Vector VariableLayout::ConstraintDuals(const Vector& z) const {
  Vector out(static_cast<Eigen::Index>(constraint_duals.size()));
  for (std::size_t k = 0; k < constraint_duals.size(); ++k) {
    out[static_cast<Eigen::Index>(k)] = z[constraint_duals[k].index];
  }
  return out;
}

Vector VariableLayout::Pack(const MixProfile& x, const StrategyProfile& s, const Vector& lambda,
                            const Vector& gamma) const {
  if (x.size() != weights.size()) throw ShapeError("mix profile has wrong player count");
  if (lambda.size() != static_cast<Eigen::Index>(simplex_duals.size()) ||
      gamma.size() != static_cast<Eigen::Index>(constraint_duals.size())) {
    throw ShapeError("dual vectors have wrong length");
  }
  Vector z = Vector::Zero(size);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (x[i].size() != weights[i].length) throw ShapeError("mix vector has wrong length");
    z.segment(weights[i].offset, weights[i].length) = x[i];
  }
  if (augmented()) {
    if (s.size() != strategies.size()) throw ShapeError("strategy profile has wrong player count");
    for (std::size_t i = 0; i < strategies.size(); ++i) {
      const Eigen::Index d = dims[i];
      if (s[i].cols() != d || s[i].rows() * d != strategies[i].length) {
        throw ShapeError("strategies of player " + std::to_string(i) + " have wrong shape");
      }
      for (Eigen::Index k = 0; k < s[i].rows(); ++k) {
        z.segment(strategies[i].offset + k * d, d) = s[i].row(k).transpose();
      }
    }
  }
  for (std::size_t i = 0; i < simplex_duals.size(); ++i) {
    z[simplex_duals[i]] = lambda[static_cast<Eigen::Index>(i)];
  }
  for (std::size_t k = 0; k < constraint_duals.size(); ++k) {
    z[constraint_duals[k].index] = gamma[static_cast<Eigen::Index>(k)];
  }
  return z;
}

void MCPInstance::Validate() const {
  if (lower.size() != n || upper.size() != n) throw ShapeError("MCP bounds have wrong length");
  if ((lower.array() > upper.array()).any()) throw ConfigurationError("MCP has lower > upper");
  if (!residual || !jacobian) throw ConfigurationError("MCP needs residual and Jacobian");
}

MCPInstance AssembleWeightMCP(const TensorGame& game) {
  game.Validate();
  MCPInstance mcp;
  mcp.layout = VariableLayout::ForTensorGame(game);
  mcp.n = mcp.layout.size;
  mcp.lower = BaseLower(mcp.layout);
  mcp.upper = Vector::Constant(mcp.n, kInf);

  auto shared = std::make_shared<const TensorGame>(game);
  const VariableLayout layout = mcp.layout;
  mcp.residual = [shared, layout](const Vector& z) {
    Vector f = Vector::Zero(layout.size);
    WeightBlocks(*shared, layout, z, f, nullptr);
    return f;
  };
  mcp.jacobian = [shared, layout](const Vector& z) {
    Vector f = Vector::Zero(layout.size);
    Matrix jac = Matrix::Zero(layout.size, layout.size);
    WeightBlocks(*shared, layout, z, f, &jac);
    return jac;
  };
  return mcp;
}

MCPInstance AssembleAugmentedMCP(const AugmentedGame& game, double omega) {
  game.Validate();
  for (const JointFunction& f : game.costs) {
    if (!f.HasDerivatives()) {
      throw ConfigurationError("cost functions need analytic gradients and Hessians");
    }
  }
  for (const ConstraintFunction& c : game.constraints) {
    if (!c.g.HasDerivatives()) {
      throw ConfigurationError("constraint functions need analytic gradients and Hessians");
    }
  }
  const IndicatorConfig indicator = game.indicator.WithOmega(omega);
  indicator.Validate();

  MCPInstance mcp;
  mcp.layout = VariableLayout::ForAugmentedGame(game);
  mcp.n = mcp.layout.size;
  mcp.lower = BaseLower(mcp.layout);
  mcp.upper = Vector::Constant(mcp.n, kInf);
  for (std::size_t i = 0; i < game.num_players(); ++i) {
    const Segment& seg = mcp.layout.strategies[i];
    const Eigen::Index d = game.dims[i];
    for (Eigen::Index k = 0; k < seg.length / d; ++k) {
      mcp.lower.segment(seg.offset + k * d, d) = game.boxes[i].lower;
      mcp.upper.segment(seg.offset + k * d, d) = game.boxes[i].upper;
    }
  }

  auto shared = std::make_shared<const AugmentedGame>(game);
  const VariableLayout layout = mcp.layout;
  auto evaluate = [shared, layout, indicator](const Vector& z, Matrix* jac) {
    Vector f = Vector::Zero(layout.size);
    const TensorGame lifted = Lift(*shared, layout.Strategies(z), indicator);
    WeightBlocks(lifted, layout, z, f, jac);
    AugmentedTerms(*shared, layout, indicator).Accumulate(z, f, jac);
    return f;
  };
  mcp.residual = [evaluate](const Vector& z) { return evaluate(z, nullptr); };
  mcp.jacobian = [evaluate, n = mcp.n](const Vector& z) {
    Matrix jac = Matrix::Zero(n, n);
    evaluate(z, &jac);
    return jac;
  };
  return mcp;
}

}  // namespace ccg
