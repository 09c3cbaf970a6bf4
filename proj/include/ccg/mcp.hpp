#pragma once

#include <cstdint>
#include <string>

#include "ccg/kkt.hpp"

namespace ccg {

struct SolverOptions {
  double tolerance = 1e-8;  // infinity norm of the reformulated residual
  int max_iterations = 200;
  double backtrack = 0.5;
  double sufficient_decrease = 1e-4;
  int max_restarts = 5;
  double perturbation = 0.1;
  std::uint64_t seed = 0;  // drives restart perturbations

  void Validate() const;
};

enum class SolveStatus { kConverged, kMaxIterations, kSingularFailure, kRestartExhausted };

const char* ToString(SolveStatus status);

struct SolveOutcome {
  SolveStatus status = SolveStatus::kMaxIterations;
  Vector z;
  double residual_norm = 0.0;
  int iterations = 0;
  int restarts = 0;

  bool converged() const { return status == SolveStatus::kConverged; }
};

// phi(a, b) = a + b - sqrt(a^2 + b^2); zero iff a >= 0, b >= 0, ab = 0.
double FischerBurmeister(double a, double b);

// Componentwise NCP reformulation of the box MCP; vanishes exactly at
// solutions. Free rows pass F through; lower-bounded rows use phi(z - l, F);
// upper-bounded rows use -phi(u - z, -F); boxed rows compose both.
Vector ReformulatedResidual(const Vector& lower, const Vector& upper, const Vector& z,
                            const Vector& f);
Vector ReformulatedResidual(const MCPInstance& mcp, const Vector& z);

// An element of the generalized Jacobian of the reformulated residual, given
// the Jacobian of F. Kinks at a = b = 0 are resolved by evaluating the
// derivative at (1e-12, 1e-12).
Matrix ReformulatedJacobian(const Vector& lower, const Vector& upper, const Vector& z,
                            const Vector& f, const Matrix& jac);

// Semismooth Newton with backtracking on 0.5 ||Phi||^2. Falls back to
// a regularized gradient step when the Newton system is singular or the
// Newton direction does not descend; restarts from perturbations of z0 when
// progress stalls. Never throws on numerical failure.
SolveOutcome Solve(const MCPInstance& mcp, const Vector& z0, const SolverOptions& opts);

}  // namespace ccg
