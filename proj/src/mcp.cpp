#include "ccg/mcp.hpp"

#include <cmath>
#include <random>

#include "ccg/random.hpp"

namespace ccg {
namespace {

constexpr double kKinkOffset = 1e-12;
constexpr double kPivotFloor = 1e-12;
constexpr double kMinStep = 1e-12;
// An attempt stalls when the merit fails to drop by 10% over this many steps.
constexpr std::size_t kStallWindow = 100;
constexpr double kStallRatio = 0.9;

struct PhiDerivative {
  double da;
  double db;
};

PhiDerivative FischerBurmeisterDerivative(double a, double b) {
  double r = std::hypot(a, b);
  if (r < kKinkOffset) {
    a += kKinkOffset;
    b += kKinkOffset;
    r = std::hypot(a, b);
  }
  return {1.0 - a / r, 1.0 - b / r};
}

Vector Project(const MCPInstance& mcp, Vector z) {
  return z.cwiseMax(mcp.lower).cwiseMin(mcp.upper);
}

double Merit(const Vector& phi) { return 0.5 * phi.squaredNorm(); }

bool FiniteVector(const Vector& v) { return v.allFinite(); }

struct Attempt {
  enum class End { kConverged, kBudget, kStalled, kSingularStall } end = End::kStalled;
  Vector z;
  double residual = 0.0;
};

class Newton {
 public:
  Newton(const MCPInstance& mcp, const SolverOptions& opts) : mcp_(mcp), opts_(opts) {}

  Attempt Run(Vector z, int& iterations) const {
    Attempt result;
    z = Project(mcp_, std::move(z));
    Vector f = mcp_.residual(z);
    Vector phi = ReformulatedResidual(mcp_.lower, mcp_.upper, z, f);
    bool last_singular = false;
    std::vector<double> history;
    while (true) {
      result.z = z;
      result.residual = FiniteVector(phi) ? phi.lpNorm<Eigen::Infinity>() : INFINITY;
      if (!FiniteVector(phi)) {
        result.end = Attempt::End::kStalled;
        return result;
      }
      if (result.residual <= opts_.tolerance) {
        result.end = Attempt::End::kConverged;
        return result;
      }
      if (iterations >= opts_.max_iterations) {
        result.end = Attempt::End::kBudget;
        return result;
      }
      ++iterations;

      const Matrix jac = mcp_.jacobian(z);
      const Matrix h = ReformulatedJacobian(mcp_.lower, mcp_.upper, z, f, jac);
      const Vector grad = h.transpose() * phi;
      const double merit = Merit(phi);
      history.push_back(merit);
      if (history.size() > kStallWindow &&
          merit > kStallRatio * history[history.size() - 1 - kStallWindow]) {
        result.end = Attempt::End::kStalled;
        return result;
      }

      bool accepted = false;
      Eigen::PartialPivLU<Matrix> lu(h);
      const bool singular =
          lu.matrixLU().diagonal().cwiseAbs().minCoeff() < kPivotFloor || !h.allFinite();
      last_singular = singular;
      if (!singular) {
        const Vector d = lu.solve(-phi);
        // Newton directions must descend on the merit function.
        if (d.allFinite() && grad.dot(d) < -1e-12 * d.squaredNorm()) {
          accepted = LineSearch(z, d, grad, merit, f, phi);
        }
      }
      if (!accepted) {
        accepted = LineSearch(z, RegularizedGradientStep(h, phi, grad), grad, merit, f, phi);
      }
      if (!accepted) {
        result.end = last_singular ? Attempt::End::kSingularStall : Attempt::End::kStalled;
        return result;
      }
    }
  }

 private:
  // Levenberg-Marquardt step (H'H + mu I) d = -H'phi with mu = ||phi||^2.
  // Stays defined when H is singular.
  Vector RegularizedGradientStep(const Matrix& h, const Vector& phi, const Vector& grad) const {
    const double mu = std::max(1e-10, phi.squaredNorm());
    Matrix normal = h.transpose() * h;
    normal.diagonal().array() += mu;
    Vector d = normal.ldlt().solve(-grad);
    if (!d.allFinite()) d = -grad;
    return d;
  }

  // Armijo backtracking on the merit function. Iterates may leave the box;
  // the reformulation keeps the residual meaningful there. On success updates z, f and phi in place.
  bool LineSearch(Vector& z, const Vector& d, const Vector& grad, double merit, Vector& f,
                  Vector& phi) const {
    double t = 1.0;
    while (t >= kMinStep) {
      const Vector trial = z + t * d;
      const Vector step = trial - z;
      if (step.lpNorm<Eigen::Infinity>() == 0.0) return false;
      const Vector f_trial = mcp_.residual(trial);
      const Vector phi_trial = ReformulatedResidual(mcp_.lower, mcp_.upper, trial, f_trial);
      if (phi_trial.allFinite() &&
          Merit(phi_trial) <= merit + opts_.sufficient_decrease * std::min(0.0, grad.dot(step)) &&
          Merit(phi_trial) < merit) {
        z = trial;
        f = f_trial;
        phi = phi_trial;
        return true;
      }
      t *= opts_.backtrack;
    }
    return false;
  }

  const MCPInstance& mcp_;
  const SolverOptions& opts_;
};

}  // namespace

void SolverOptions::Validate() const {
  if (!(tolerance > 0.0)) throw ConfigurationError("solver tolerance must be positive");
  if (max_iterations < 1 || max_restarts < 1) {
    throw ConfigurationError("iteration and restart counts must be at least 1");
  }
  if (!(backtrack > 0.0 && backtrack < 1.0)) {
    throw ConfigurationError("backtracking factor must lie in (0, 1)");
  }
  if (!(sufficient_decrease > 0.0 && sufficient_decrease < 0.5)) {
    throw ConfigurationError("sufficient-decrease constant must lie in (0, 0.5)");
  }
  if (!(perturbation >= 0.0)) throw ConfigurationError("perturbation scale must be >= 0");
}

const char* ToString(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged:
      return "converged";
    case SolveStatus::kMaxIterations:
      return "max_iterations";
    case SolveStatus::kSingularFailure:
      return "singular_failure";
    case SolveStatus::kRestartExhausted:
      return "restart_exhausted";
  }
  return "unknown";
}

double FischerBurmeister(double a, double b) { return a + b - std::hypot(a, b); }

Vector ReformulatedResidual(const Vector& lower, const Vector& upper, const Vector& z,
                            const Vector& f) {
  Vector phi(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const bool has_lower = std::isfinite(lower[i]);
    const bool has_upper = std::isfinite(upper[i]);
    if (has_lower && has_upper) {
      phi[i] = FischerBurmeister(z[i] - lower[i], -FischerBurmeister(upper[i] - z[i], -f[i]));
    } else if (has_lower) {
      phi[i] = FischerBurmeister(z[i] - lower[i], f[i]);
    } else if (has_upper) {
      phi[i] = -FischerBurmeister(upper[i] - z[i], -f[i]);
    } else {
      phi[i] = f[i];
    }
  }
  return phi;
}

Vector ReformulatedResidual(const MCPInstance& mcp, const Vector& z) {
  return ReformulatedResidual(mcp.lower, mcp.upper, z, mcp.residual(z));
}

Matrix ReformulatedJacobian(const Vector& lower, const Vector& upper, const Vector& z,
                            const Vector& f, const Matrix& jac) {
  const Eigen::Index n = z.size();
  Matrix h(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool has_lower = std::isfinite(lower[i]);
    const bool has_upper = std::isfinite(upper[i]);
    double diag = 0.0;   // coefficient on e_i
    double scale = 1.0;  // coefficient on row i of jac
    if (has_lower && has_upper) {
      const double inner = FischerBurmeister(upper[i] - z[i], -f[i]);
      const PhiDerivative di = FischerBurmeisterDerivative(upper[i] - z[i], -f[i]);
      const PhiDerivative dout = FischerBurmeisterDerivative(z[i] - lower[i], -inner);
      diag = dout.da + dout.db * di.da;
      scale = dout.db * di.db;
    } else if (has_lower) {
      const PhiDerivative d = FischerBurmeisterDerivative(z[i] - lower[i], f[i]);
      diag = d.da;
      scale = d.db;
    } else if (has_upper) {
      const PhiDerivative d = FischerBurmeisterDerivative(upper[i] - z[i], -f[i]);
      diag = d.da;
      scale = d.db;
    }
    h.row(i) = scale * jac.row(i);
    h(i, i) += diag;
  }
  return h;
}

SolveOutcome Solve(const MCPInstance& mcp, const Vector& z0, const SolverOptions& opts) {
  mcp.Validate();
  opts.Validate();
  if (z0.size() != mcp.n) throw ShapeError("initial point has wrong dimension");

  Rng rng(opts.seed);
  const Newton newton(mcp, opts);
  const Vector start = Project(mcp, z0);

  SolveOutcome out;
  out.z = start;
  out.residual_norm = INFINITY;
  int iterations = 0;
  Attempt::End last_end = Attempt::End::kStalled;

  for (int attempt = 0; attempt <= opts.max_restarts; ++attempt) {
    Vector z = start;
    if (attempt > 0) {
      out.restarts = attempt;
      std::vector<Segment> primal = mcp.layout.weights;
      primal.insert(primal.end(), mcp.layout.strategies.begin(), mcp.layout.strategies.end());
      if (primal.empty()) primal.push_back({0, mcp.n});
      const bool game_layout = mcp.layout.size == mcp.n && mcp.n > 0 && !mcp.layout.weights.empty();
      if (game_layout) {
        for (const auto idx : mcp.layout.simplex_duals) z[idx] = 0.0;
        for (const auto& slot : mcp.layout.constraint_duals) z[slot.index] = 0.0;
      }
      for (const Segment& seg : primal) {
        for (Eigen::Index k = 0; k < seg.length; ++k) {
          z[seg.offset + k] += opts.perturbation * (2.0 * UnitUniform(rng) - 1.0);
        }
      }
      // Perturbed weights are pulled back onto the simplex.
      for (const Segment& seg : mcp.layout.weights) {
        auto w = z.segment(seg.offset, seg.length);
        w = w.cwiseMax(0.0);
        const double total = w.sum();
        if (total > 0.0) w /= total; else w.setConstant(1.0 / static_cast<double>(seg.length));
      }
    }
    int attempt_iterations = 0;
    Attempt a = newton.Run(std::move(z), attempt_iterations);
    iterations += attempt_iterations;
    last_end = a.end;
    if (a.residual < out.residual_norm || attempt == 0) {
      out.z = a.z;
      out.residual_norm = a.residual;
    }
    if (a.end == Attempt::End::kConverged) {
      out.z = a.z;
      out.residual_norm = a.residual;
      out.status = SolveStatus::kConverged;
      out.iterations = iterations;
      return out;
    }
  }
  out.iterations = iterations;
  switch (last_end) {
    case Attempt::End::kBudget:
      out.status = SolveStatus::kMaxIterations;
      break;
    case Attempt::End::kSingularStall:
      out.status = SolveStatus::kSingularFailure;
      break;
    default:
      out.status = SolveStatus::kRestartExhausted;
  }
  return out;
}

}  // namespace ccg
