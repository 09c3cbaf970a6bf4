// Experiment runner for chance-constrained tensor games.
//
//   ccg bulk --config hpr.cfg --seed 7 --trials 100 --out runs/hpr
//
// Exit status: 0 success, 1 configuration or I/O error, 2 every trial failed.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ccg/harness.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitAllFailed = 2;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> threads;
};

void AddCommonOptions(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "flat key = value configuration file");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--trials", o.trials, "trial count (bench: repeats per cell)");
  cmd->add_option("--threads", o.threads, "worker threads, 0 for all cores");
}

ccg::ExperimentConfig LoadConfig(const Overrides& o, bool bench) {
  ccg::KeyValueConfig kv;
  if (!o.config.empty()) kv = ccg::KeyValueConfig::Load(o.config);
  if (o.seed) kv.Set("run.seed", std::to_string(*o.seed));
  if (o.out) kv.Set("output.dir", *o.out);
  if (o.threads) kv.Set("run.threads", std::to_string(*o.threads));
  if (o.trials) kv.Set(bench ? "bench.repeats" : "run.trials", std::to_string(*o.trials));
  return ccg::ExperimentConfig::FromKeyValues(kv);
}

class OutputDir {
 public:
  explicit OutputDir(const std::string& path) : root_(path) {
    std::error_code ec;
    std::filesystem::create_directories(root_, ec);
    if (ec) throw ccg::ConfigurationError("cannot create output directory " + path);
  }

  void Write(const std::string& name, const std::function<void(std::ostream&)>& body) const {
    const auto path = root_ / name;
    std::ofstream out(path);
    if (!out) throw ccg::ConfigurationError("cannot write " + path.string());
    body(out);
  }

 private:
  std::filesystem::path root_;
};

std::vector<ccg::TrialRecord> Flatten(const std::vector<ccg::BulkResult>& results) {
  std::vector<ccg::TrialRecord> all;
  for (const auto& r : results) all.insert(all.end(), r.records.begin(), r.records.end());
  return all;
}

int WriteBulk(const OutputDir& out, const std::vector<ccg::BulkResult>& results) {
  std::vector<ccg::BulkSummary> summaries;
  std::size_t solved = 0;
  for (const auto& r : results) {
    summaries.push_back(r.summary);
    solved += r.summary.solved;
  }
  const auto records = Flatten(results);
  out.Write("trials.csv", [&](std::ostream& os) { ccg::WriteTrialsCsv(os, records); });
  out.Write("summary.csv", [&](std::ostream& os) { ccg::WriteSummaryCsv(os, summaries); });
  out.Write("timing.csv", [&](std::ostream& os) { ccg::WriteTimingCsv(os, records); });
  for (const auto& s : summaries) {
    std::printf("eps %-6s solved %zu/%zu  feasibility %s  mean solve %s ms\n",
                ccg::FormatNumber(s.epsilon).c_str(), s.solved, s.trials,
                s.mean_feasibility.empty() ? "-" : ccg::FormatNumber(s.mean_feasibility[0]).c_str(),
                ccg::FormatNumber(s.mean_solve_ms).c_str());
  }
  return solved == 0 ? kExitAllFailed : 0;
}

int RunSolve(const ccg::ExperimentConfig& cfg) {
  const ccg::AugmentedGame game = ccg::BuildScenario(cfg);
  const std::uint64_t seed = ccg::TrialSeeds(cfg.seed, 1).front();
  ccg::Solution solution;
  ccg::BulkResult result;
  result.records.push_back(ccg::RunTrial(game, cfg, 0, seed, &solution));
  result.summary = ccg::Summarize(result.records, cfg.epsilon());
  const OutputDir out(cfg.output_dir);
  out.Write("solution.json", [&](std::ostream& os) { os << ccg::SolutionJson(solution) << '\n'; });
  return WriteBulk(out, {result});
}

int RunBench(const ccg::ExperimentConfig& cfg) {
  const auto rows = ccg::BenchChain(cfg);
  const OutputDir out(cfg.output_dir);
  out.Write("bench.csv", [&](std::ostream& os) { ccg::WriteBenchCsv(os, rows); });
  std::size_t solved = 0;
  for (const auto& r : rows) {
    solved += r.solved;
    std::printf("N=%zu m=%zu solved %zu/%zu  %s ms [%s, %s]\n", r.players, r.strategies, r.solved,
                r.repeats, ccg::FormatNumber(r.mean_ms).c_str(),
                ccg::FormatNumber(r.ci_low_ms).c_str(), ccg::FormatNumber(r.ci_high_ms).c_str());
  }
  return solved == 0 ? kExitAllFailed : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibria of chance-constrained tensor games"};
  app.require_subcommand(1);

  Overrides o;
  auto* solve = app.add_subcommand("solve", "single trial, writes solution.json");
  auto* bulk = app.add_subcommand("bulk", "seeded randomized trials");
  auto* sweep_eps = app.add_subcommand("sweep-eps", "bulk runs over sweep.epsilons");
  auto* sweep_omega = app.add_subcommand("sweep-omega", "constraint distance per strictness stage");
  auto* bench = app.add_subcommand("bench", "chain scenario timing grid");
  for (auto* cmd : {solve, bulk, sweep_eps, sweep_omega, bench}) AddCommonOptions(cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const ccg::ExperimentConfig cfg = LoadConfig(o, bench->parsed());
    if (solve->parsed()) return RunSolve(cfg);
    if (bench->parsed()) return RunBench(cfg);
    if (bulk->parsed()) return WriteBulk(OutputDir(cfg.output_dir), {ccg::RunBulk(cfg)});
    if (sweep_eps->parsed()) {
      return WriteBulk(OutputDir(cfg.output_dir), ccg::SweepEpsilon(cfg));
    }
    const ccg::OmegaSweep sweep = ccg::SweepOmega(cfg);
    const OutputDir out(cfg.output_dir);
    out.Write("sweep_omega.csv", [&](std::ostream& os) { ccg::WriteOmegaCsv(os, sweep.rows); });
    return WriteBulk(out, sweep.bulk);
  } catch (const ccg::ConfigurationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}
