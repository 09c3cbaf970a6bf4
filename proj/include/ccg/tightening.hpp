#pragma once

#include <functional>
#include <vector>

#include "ccg/mcp.hpp"

namespace ccg {

struct TighteningConfig {
  double omega_initial = 1.0;
  double omega_desired = 64.0;
  double omega_min_accept = 10.0;  // runs stopping below this count as failures
  SolverOptions solver;

  void Validate() const;
};

enum class SolutionStatus { kSolved, kFailed };

const char* ToString(SolutionStatus status);

struct Solution {
  MixProfile x;
  StrategyProfile s;
  Vector lambda;  // one per player
  Vector gamma;   // one per (owner, constraint), in VariableLayout order
  double omega_reached = 0.0;
  SolutionStatus status = SolutionStatus::kFailed;
  int solves = 0;
  int newton_iterations = 0;

  bool solved() const { return status == SolutionStatus::kSolved; }
};

// Strictness values visited by the doubling schedule: omega_initial * 2^k
// while below 2 * omega_desired.
std::vector<double> OmegaSchedule(double omega_initial, double omega_desired);

// Observes every stage of the schedule. `converged` is false for the stage
// that ended the run; `current` then holds the last successful iterate.
struct StageRecord {
  double omega = 0.0;
  bool converged = false;
  const Solution* current = nullptr;
};
using StageObserver = std::function<void(const StageRecord&)>;

// Solves the augmented KKT system at doubling strictness, warm-starting each
// solve from the previous one. Expectation-mode games take a single solve.
Solution IterativeTighten(const AugmentedGame& game, const MixProfile& x0,
                          const StrategyProfile& s0, const TighteningConfig& cfg,
                          const StageObserver& observer = {});

// Packs a solution into the MCP variable vector of `layout`.
Vector PackSolution(const VariableLayout& layout, const Solution& solution);

}  // namespace ccg
