#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ccg/config.hpp"
#include "ccg/evaluation.hpp"
#include "ccg/scenarios.hpp"

namespace ccg {

// Maximum total tensor entries a benchmark cell may allocate.
constexpr double kMaxBenchTensorEntries = 1e7;

AugmentedGame BuildScenario(const ScenarioConfig& scenario, const ConstraintSetup& setup);
AugmentedGame BuildScenario(const ExperimentConfig& cfg);
TighteningConfig MakeTighteningConfig(const ExperimentConfig& cfg, std::uint64_t seed);

// Player and constraint the per-trial columns focus on: the first
// constraint and its first owner (the poacher in the hog scenarios).
struct Focus {
  std::size_t player = 0;
  std::optional<std::size_t> constraint;
};
Focus FocusOf(const AugmentedGame& game);

// Independent per-trial seeds derived from the master seed.
std::vector<std::uint64_t> TrialSeeds(std::uint64_t master, std::size_t count);

struct InitialPoint {
  MixProfile x;
  StrategyProfile s;
};
// Dirichlet(1) weights and uniform strategies in [lo, hi] per coordinate.
InitialPoint DrawInitialPoint(const AugmentedGame& game, std::uint64_t seed, double lo, double hi);

struct TrialRecord {
  std::size_t trial_id = 0;
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  SolutionStatus status = SolutionStatus::kFailed;
  double omega_reached = 0.0;
  int solves = 0;
  int newton_iterations = 0;
  std::vector<double> costs;        // per player
  std::vector<double> feasibility;  // per constraint
  Vector focus_weights;
  double min_distance = 0.0;  // NaN without a focus distance
  // Smallest distance from any focus strategy coordinate to the box faces.
  double boundary_gap = 0.0;
  double kkt_residual = 0.0;
  double improvement = 0.0;
  double solve_ms = 0.0;

  bool solved() const { return status == SolutionStatus::kSolved; }
};

struct BulkSummary {
  double epsilon = 0.0;
  std::size_t trials = 0;
  std::size_t solved = 0;
  double pct_solved = 0.0;
  // Means over solved trials; NaN when nothing solved.
  std::vector<double> mean_costs;
  std::vector<double> mean_feasibility;
  double mean_min_distance = 0.0;
  double mean_omega_reached = 0.0;
  double mean_kkt_residual = 0.0;
  double mean_improvement = 0.0;
  double mean_solve_ms = 0.0;  // over all trials
};

struct BulkResult {
  std::vector<TrialRecord> records;  // sorted by trial id
  BulkSummary summary;
};

using TrialObserver =
    std::function<void(std::size_t trial_id, const StageRecord& stage, const AugmentedGame& game)>;

// Runs and evaluates one trial. The observer sees every tightening stage.
TrialRecord RunTrial(const AugmentedGame& game, const ExperimentConfig& cfg, std::size_t trial_id,
                     std::uint64_t seed, Solution* solution = nullptr,
                     const TrialObserver& observer = {});

BulkResult RunBulk(const ExperimentConfig& cfg, const TrialObserver& observer = {});
BulkSummary Summarize(const std::vector<TrialRecord>& records, double epsilon);

// One bulk run per epsilon (chance mode), all with the same trial seeds.
std::vector<BulkResult> SweepEpsilon(const ExperimentConfig& cfg);

struct OmegaRow {
  double epsilon = 0.0;
  double omega = 0.0;
  std::size_t trials = 0;  // trials that converged at this stage
  double mean_distance = 0.0;
};
struct OmegaSweep {
  std::vector<OmegaRow> rows;
  std::vector<BulkResult> bulk;
};
// Records the minimum supported distance after every converged stage.
OmegaSweep SweepOmega(const ExperimentConfig& cfg);

struct BenchRow {
  std::size_t players = 0;
  std::size_t strategies = 0;
  double tensor_entries = 0.0;
  std::size_t repeats = 0;
  std::size_t solved = 0;
  double mean_ms = 0.0;
  double ci_low_ms = 0.0;  // mean -/+ 1.96 standard errors
  double ci_high_ms = 0.0;
};
// Times the chain scenario over the configured grid. Cells whose tensors
// would exceed kMaxBenchTensorEntries are rejected before anything runs.
std::vector<BenchRow> BenchChain(const ExperimentConfig& cfg);
double ChainTensorEntries(std::size_t players, std::size_t strategies);

// Calls fn(i) for i in [0, count) on `threads` workers (0: hardware
// concurrency).
void ParallelFor(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);

// Writers. Numbers use 6 significant digits.
std::string FormatNumber(double v);
void WriteTrialsCsv(std::ostream& out, const std::vector<TrialRecord>& records);
void WriteSummaryCsv(std::ostream& out, const std::vector<BulkSummary>& summaries);
void WriteTimingCsv(std::ostream& out, const std::vector<TrialRecord>& records);
void WriteOmegaCsv(std::ostream& out, const std::vector<OmegaRow>& rows);
void WriteBenchCsv(std::ostream& out, const std::vector<BenchRow>& rows);
std::string SolutionJson(const Solution& solution);

}  // namespace ccg
