#include "ccg/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "json.hpp"

#include "ccg/random.hpp"

namespace ccg {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ConstraintSetup SetupFor(const ExperimentConfig& cfg) {
  return cfg.mode == IndicatorMode::kChance ? ConstraintSetup::Chance(cfg.chance_epsilon)
                                            : ConstraintSetup::Expectation(cfg.expectation_epsilon);
}

double MeanOf(const std::vector<double>& values) {
  double total = 0.0;
  std::size_t n = 0;
  for (double v : values) {
    if (std::isnan(v)) continue;
    total += v;
    ++n;
  }
  return n ? total / static_cast<double>(n) : kNaN;
}

double BoundaryGap(const AugmentedGame& game, const StrategyProfile& s, std::size_t player) {
  const StrategyBox& box = game.boxes[player];
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index r = 0; r < s[player].rows(); ++r) {
    for (Eigen::Index c = 0; c < s[player].cols(); ++c) {
      const double v = s[player](r, c);
      gap = std::min({gap, std::abs(v - box.lower[c]), std::abs(box.upper[c] - v)});
    }
  }
  return gap;
}

template <typename Row>
void WriteRow(std::ostream& out, const Row& cells) {
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) out << ',';
    out << cells[k];
  }
  out << '\n';
}

void AppendIndexed(std::vector<std::string>& header, const std::string& prefix, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) header.push_back(prefix + std::to_string(k));
}

}  // namespace

AugmentedGame BuildScenario(const ScenarioConfig& sc, const ConstraintSetup& setup) {
  if (sc.name == "hpr") {
    HprParams p;
    p.radius = sc.radius;
    p.box_lower = sc.box_lower;
    p.box_upper = sc.box_upper;
    if (sc.strategies.size() == 1) {
      p.strategy_counts.assign(3, sc.strategies.front());
    } else if (sc.strategies.size() == 3) {
      p.strategy_counts = sc.strategies;
    } else {
      throw ConfigurationError("scenario.strategies for hpr takes 1 or 3 counts");
    }
    return HogPoacherRanger(p, setup);
  }
  if (sc.name == "chain") {
    if (sc.strategies.size() != 1) {
      throw ConfigurationError("scenario.strategies for chain takes a single count");
    }
    ChainParams p;
    p.num_players = sc.players;
    p.strategy_count = sc.strategies.front();
    p.radius = sc.radius;
    p.box_lower = sc.box_lower;
    p.box_upper = sc.box_upper;
    return NPlayerChain(p, setup);
  }
  if (sc.name == "stationary_hog") {
    if (sc.strategies.size() != 2) {
      throw ConfigurationError("scenario.strategies for stationary_hog takes poacher,ranger counts");
    }
    StationaryHogParams p;
    p.radius = sc.radius;
    p.box_lower = sc.box_lower;
    p.box_upper = sc.box_upper;
    p.poacher_strategies = sc.strategies[0];
    p.ranger_strategies = sc.strategies[1];
    p.hog_x = sc.hog_x;
    p.hog_y = sc.hog_y;
    return StationaryHogVariant(p, setup);
  }
  throw ConfigurationError("unknown scenario '" + sc.name + "'");
}

AugmentedGame BuildScenario(const ExperimentConfig& cfg) {
  return BuildScenario(cfg.scenario, SetupFor(cfg));
}

TighteningConfig MakeTighteningConfig(const ExperimentConfig& cfg, std::uint64_t seed) {
  TighteningConfig t;
  t.omega_initial = cfg.omega_initial;
  t.omega_desired = cfg.omega_desired;
  t.omega_min_accept = cfg.omega_min_accept;
  t.solver.tolerance = cfg.solver_tolerance;
  t.solver.max_iterations = cfg.solver_max_iterations;
  t.solver.max_restarts = cfg.solver_max_restarts;
  t.solver.perturbation = cfg.solver_perturbation;
  t.solver.seed = seed;
  t.Validate();
  return t;
}

Focus FocusOf(const AugmentedGame& game) {
  Focus f;
  if (!game.constraints.empty()) {
    f.constraint = 0;
    f.player = game.constraints.front().spec.owners.front();
  }
  return f;
}

std::vector<std::uint64_t> TrialSeeds(std::uint64_t master, std::size_t count) {
  std::vector<std::uint64_t> seeds(count);
  std::uint64_t state = master;
  for (auto& s : seeds) s = SplitMix64(state);
  return seeds;
}

InitialPoint DrawInitialPoint(const AugmentedGame& game, std::uint64_t seed, double lo, double hi) {
  Rng rng(seed);
  InitialPoint p;
  for (std::size_t i = 0; i < game.num_players(); ++i) {
    const auto m = static_cast<Eigen::Index>(game.strategy_counts[i]);
    p.x.push_back(SampleSimplex(rng, m));
    Matrix s(m, game.dims[i]);
    for (Eigen::Index r = 0; r < m; ++r) {
      for (Eigen::Index c = 0; c < game.dims[i]; ++c) s(r, c) = UniformIn(rng, lo, hi);
    }
    p.s.push_back(std::move(s));
  }
  return p;
}

TrialRecord RunTrial(const AugmentedGame& game, const ExperimentConfig& cfg, std::size_t trial_id,
                     std::uint64_t seed, Solution* solution, const TrialObserver& observer) {
  const double lo = cfg.init_lower.value_or(cfg.scenario.box_lower);
  const double hi = cfg.init_upper.value_or(cfg.scenario.box_upper);
  const InitialPoint init = DrawInitialPoint(game, seed, lo, hi);
  const TighteningConfig tighten = MakeTighteningConfig(cfg, seed);

  StageObserver stage_observer;
  if (observer) {
    stage_observer = [&](const StageRecord& stage) { observer(trial_id, stage, game); };
  }
  const auto start = std::chrono::steady_clock::now();
  Solution sol = IterativeTighten(game, init.x, init.s, tighten, stage_observer);
  const auto stop = std::chrono::steady_clock::now();

  TrialRecord rec;
  rec.trial_id = trial_id;
  rec.seed = seed;
  rec.epsilon = cfg.epsilon();
  rec.status = sol.status;
  rec.omega_reached = sol.omega_reached;
  rec.solves = sol.solves;
  rec.newton_iterations = sol.newton_iterations;
  rec.solve_ms = std::chrono::duration<double, std::milli>(stop - start).count();

  EvaluationOptions eval;
  eval.support_threshold = cfg.support_threshold;
  eval.probe_trials = cfg.probe_trials;
  eval.seed = seed ^ 0x5eedULL;
  const EvaluationReport report = Evaluate(game, sol, eval);
  rec.costs = report.expected_costs;
  rec.feasibility = report.feasibility;
  rec.kkt_residual = report.kkt_residual;
  rec.improvement = report.improvement;

  const Focus focus = FocusOf(game);
  rec.focus_weights = sol.x[focus.player];
  rec.min_distance = focus.constraint ? report.min_distances[*focus.constraint] : kNaN;
  rec.boundary_gap = BoundaryGap(game, sol.s, focus.player);
  if (solution) *solution = std::move(sol);
  return rec;
}

void ParallelFor(std::size_t count, std::size_t threads,
                 const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

BulkSummary Summarize(const std::vector<TrialRecord>& records, double epsilon) {
  BulkSummary s;
  s.epsilon = epsilon;
  s.trials = records.size();
  std::vector<const TrialRecord*> solved;
  std::vector<double> times;
  for (const TrialRecord& r : records) {
    times.push_back(r.solve_ms);
    if (r.solved()) solved.push_back(&r);
  }
  s.solved = solved.size();
  s.pct_solved = s.trials ? 100.0 * static_cast<double>(s.solved) / static_cast<double>(s.trials) : 0.0;
  s.mean_solve_ms = MeanOf(times);

  const std::size_t players = records.empty() ? 0 : records.front().costs.size();
  const std::size_t constraints = records.empty() ? 0 : records.front().feasibility.size();
  auto mean_over_solved = [&](const std::function<double(const TrialRecord&)>& field) {
    std::vector<double> values;
    for (const TrialRecord* r : solved) values.push_back(field(*r));
    return MeanOf(values);
  };
  for (std::size_t i = 0; i < players; ++i) {
    s.mean_costs.push_back(mean_over_solved([i](const TrialRecord& r) { return r.costs[i]; }));
  }
  for (std::size_t j = 0; j < constraints; ++j) {
    s.mean_feasibility.push_back(
        mean_over_solved([j](const TrialRecord& r) { return r.feasibility[j]; }));
  }
  s.mean_min_distance = mean_over_solved([](const TrialRecord& r) { return r.min_distance; });
  s.mean_omega_reached = mean_over_solved([](const TrialRecord& r) { return r.omega_reached; });
  s.mean_kkt_residual = mean_over_solved([](const TrialRecord& r) { return r.kkt_residual; });
  s.mean_improvement = mean_over_solved([](const TrialRecord& r) { return r.improvement; });
  return s;
}

BulkResult RunBulk(const ExperimentConfig& cfg, const TrialObserver& observer) {
  cfg.Validate();
  const AugmentedGame game = BuildScenario(cfg);
  const std::vector<std::uint64_t> seeds = TrialSeeds(cfg.seed, cfg.trials);
  BulkResult result;
  result.records.resize(cfg.trials);
  ParallelFor(cfg.trials, cfg.threads, [&](std::size_t t) {
    result.records[t] = RunTrial(game, cfg, t, seeds[t], nullptr, observer);
  });
  result.summary = Summarize(result.records, cfg.epsilon());
  return result;
}

std::vector<BulkResult> SweepEpsilon(const ExperimentConfig& cfg) {
  std::vector<BulkResult> results;
  for (double eps : cfg.sweep_epsilons) {
    ExperimentConfig run = cfg;
    run.mode = IndicatorMode::kChance;
    run.chance_epsilon = eps;
    results.push_back(RunBulk(run));
  }
  return results;
}

OmegaSweep SweepOmega(const ExperimentConfig& cfg) {
  if (cfg.mode != IndicatorMode::kChance) {
    throw ConfigurationError("the omega sweep needs chance mode");
  }
  OmegaSweep sweep;
  const std::vector<double> schedule = OmegaSchedule(cfg.omega_initial, cfg.omega_desired);
  for (double eps : cfg.sweep_epsilons) {
    ExperimentConfig run = cfg;
    run.chance_epsilon = eps;
    // distances[trial][stage], NaN where the stage did not converge.
    std::vector<std::vector<double>> distances(run.trials,
                                               std::vector<double>(schedule.size(), kNaN));
    const TrialObserver observer = [&](std::size_t trial, const StageRecord& stage,
                                       const AugmentedGame& game) {
      if (!stage.converged) return;
      const Focus focus = FocusOf(game);
      if (!focus.constraint) throw ConfigurationError("scenario has no constraint distance");
      const auto it = std::find(schedule.begin(), schedule.end(), stage.omega);
      distances[trial][static_cast<std::size_t>(it - schedule.begin())] =
          MinSupportedDistance(game, stage.current->x, stage.current->s, *focus.constraint,
                               run.support_threshold);
    };
    sweep.bulk.push_back(RunBulk(run, observer));
    for (std::size_t k = 0; k < schedule.size(); ++k) {
      std::vector<double> column;
      for (const auto& per_trial : distances) column.push_back(per_trial[k]);
      OmegaRow row;
      row.epsilon = eps;
      row.omega = schedule[k];
      row.trials = static_cast<std::size_t>(
          std::count_if(column.begin(), column.end(), [](double v) { return !std::isnan(v); }));
      row.mean_distance = MeanOf(column);
      sweep.rows.push_back(row);
    }
  }
  return sweep;
}

double ChainTensorEntries(std::size_t players, std::size_t strategies) {
  const double joint = std::pow(static_cast<double>(strategies), static_cast<double>(players));
  const double tensors = static_cast<double>(players + (players > 2 ? players - 2 : 0));
  return joint * tensors;
}

std::vector<BenchRow> BenchChain(const ExperimentConfig& cfg) {
  cfg.Validate();
  for (std::size_t n : cfg.bench_players) {
    for (std::size_t m : cfg.bench_strategies) {
      if (ChainTensorEntries(n, m) > kMaxBenchTensorEntries) {
        throw ConfigurationError("bench cell N=" + std::to_string(n) + " m=" + std::to_string(m) +
                                 " exceeds the tensor size limit");
      }
    }
  }
  std::vector<BenchRow> rows;
  for (std::size_t n : cfg.bench_players) {
    for (std::size_t m : cfg.bench_strategies) {
      ExperimentConfig run = cfg;
      run.scenario.name = "chain";
      run.scenario.players = n;
      run.scenario.strategies = {m};
      const AugmentedGame game = BuildScenario(run);
      const std::vector<std::uint64_t> seeds = TrialSeeds(cfg.seed, cfg.bench_repeats);
      const double lo = run.init_lower.value_or(run.scenario.box_lower);
      const double hi = run.init_upper.value_or(run.scenario.box_upper);

      BenchRow row;
      row.players = n;
      row.strategies = m;
      row.tensor_entries = ChainTensorEntries(n, m);
      row.repeats = cfg.bench_repeats;
      std::vector<double> times;
      for (std::uint64_t seed : seeds) {
        const InitialPoint init = DrawInitialPoint(game, seed, lo, hi);
        const TighteningConfig tighten = MakeTighteningConfig(run, seed);
        const auto start = std::chrono::steady_clock::now();
        const Solution sol = IterativeTighten(game, init.x, init.s, tighten);
        const auto stop = std::chrono::steady_clock::now();
        times.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
        row.solved += sol.solved();
      }
      const double k = static_cast<double>(times.size());
      row.mean_ms = MeanOf(times);
      double var = 0.0;
      for (double t : times) var += (t - row.mean_ms) * (t - row.mean_ms);
      const double se = times.size() > 1 ? std::sqrt(var / (k - 1.0) / k) : 0.0;
      row.ci_low_ms = row.mean_ms - 1.96 * se;
      row.ci_high_ms = row.mean_ms + 1.96 * se;
      rows.push_back(row);
    }
  }
  return rows;
}

std::string FormatNumber(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v == 0.0 ? 0.0 : v);  // folds -0
  return buf;
}

void WriteTrialsCsv(std::ostream& out, const std::vector<TrialRecord>& records) {
  const std::size_t players = records.empty() ? 0 : records.front().costs.size();
  const std::size_t constraints = records.empty() ? 0 : records.front().feasibility.size();
  const std::size_t weights = records.empty() ? 0 : static_cast<std::size_t>(records.front().focus_weights.size());
  std::vector<std::string> header = {"trial_id", "seed",  "epsilon", "status",
                                     "omega_reached", "solves", "newton_iterations"};
  AppendIndexed(header, "cost_", players);
  AppendIndexed(header, "feasibility_", constraints);
  AppendIndexed(header, "focus_weight_", weights);
  for (const char* h : {"min_distance", "boundary_gap", "kkt_residual", "improvement"}) {
    header.emplace_back(h);
  }
  WriteRow(out, header);
  for (const TrialRecord& r : records) {
    std::vector<std::string> row = {std::to_string(r.trial_id), std::to_string(r.seed),
                                    FormatNumber(r.epsilon),   ToString(r.status),
                                    FormatNumber(r.omega_reached), std::to_string(r.solves),
                                    std::to_string(r.newton_iterations)};
    for (double c : r.costs) row.push_back(FormatNumber(c));
    for (double f : r.feasibility) row.push_back(FormatNumber(f));
    for (Eigen::Index k = 0; k < r.focus_weights.size(); ++k) {
      row.push_back(FormatNumber(r.focus_weights[k]));
    }
    for (double v : {r.min_distance, r.boundary_gap, r.kkt_residual, r.improvement}) {
      row.push_back(FormatNumber(v));
    }
    WriteRow(out, row);
  }
}

void WriteSummaryCsv(std::ostream& out, const std::vector<BulkSummary>& summaries) {
  const std::size_t players = summaries.empty() ? 0 : summaries.front().mean_costs.size();
  const std::size_t constraints = summaries.empty() ? 0 : summaries.front().mean_feasibility.size();
  std::vector<std::string> header = {"epsilon", "trials", "solved", "pct_solved"};
  AppendIndexed(header, "mean_cost_", players);
  AppendIndexed(header, "mean_feasibility_", constraints);
  for (const char* h :
       {"mean_min_distance", "mean_omega_reached", "mean_kkt_residual", "mean_improvement"}) {
    header.emplace_back(h);
  }
  WriteRow(out, header);
  for (const BulkSummary& s : summaries) {
    std::vector<std::string> row = {FormatNumber(s.epsilon), std::to_string(s.trials),
                                    std::to_string(s.solved), FormatNumber(s.pct_solved)};
    for (double c : s.mean_costs) row.push_back(FormatNumber(c));
    for (double f : s.mean_feasibility) row.push_back(FormatNumber(f));
    for (double v : {s.mean_min_distance, s.mean_omega_reached, s.mean_kkt_residual,
                     s.mean_improvement}) {
      row.push_back(FormatNumber(v));
    }
    WriteRow(out, row);
  }
}

void WriteTimingCsv(std::ostream& out, const std::vector<TrialRecord>& records) {
  WriteRow(out, std::vector<std::string>{"epsilon", "trial_id", "solve_ms"});
  for (const TrialRecord& r : records) {
    WriteRow(out, std::vector<std::string>{FormatNumber(r.epsilon), std::to_string(r.trial_id),
                                           FormatNumber(r.solve_ms)});
  }
}

void WriteOmegaCsv(std::ostream& out, const std::vector<OmegaRow>& rows) {
  WriteRow(out, std::vector<std::string>{"epsilon", "omega", "trials", "mean_distance"});
  for (const OmegaRow& r : rows) {
    WriteRow(out, std::vector<std::string>{FormatNumber(r.epsilon), FormatNumber(r.omega),
                                           std::to_string(r.trials),
                                           FormatNumber(r.mean_distance)});
  }
}

void WriteBenchCsv(std::ostream& out, const std::vector<BenchRow>& rows) {
  WriteRow(out, std::vector<std::string>{"players", "strategies", "tensor_entries", "repeats",
                                         "solved", "mean_ms", "ci95_low_ms", "ci95_high_ms"});
  for (const BenchRow& r : rows) {
    WriteRow(out, std::vector<std::string>{
                      std::to_string(r.players), std::to_string(r.strategies),
                      FormatNumber(r.tensor_entries), std::to_string(r.repeats),
                      std::to_string(r.solved), FormatNumber(r.mean_ms),
                      FormatNumber(r.ci_low_ms), FormatNumber(r.ci_high_ms)});
  }
}

std::string SolutionJson(const Solution& solution) {
  nlohmann::json j;
  j["status"] = ToString(solution.status);
  j["omega_reached"] = solution.omega_reached;
  j["solves"] = solution.solves;
  j["newton_iterations"] = solution.newton_iterations;
  auto& x = j["x"] = nlohmann::json::array();
  for (const Vector& w : solution.x) x.push_back(std::vector<double>(w.data(), w.data() + w.size()));
  auto& s = j["s"] = nlohmann::json::array();
  for (const Matrix& m : solution.s) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      const Vector row = m.row(r).transpose();
      rows.push_back(std::vector<double>(row.data(), row.data() + row.size()));
    }
    s.push_back(rows);
  }
  j["lambda"] = std::vector<double>(solution.lambda.data(),
                                    solution.lambda.data() + solution.lambda.size());
  j["gamma"] = std::vector<double>(solution.gamma.data(),
                                   solution.gamma.data() + solution.gamma.size());
  return j.dump(2);
}

}  // namespace ccg
