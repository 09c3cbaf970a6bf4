#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ccg/game.hpp"

namespace ccg {

// Flat "section.key = value" text. Blank lines and lines starting with '#'
// are ignored. Every key may appear once.
class KeyValueConfig {
 public:
  static KeyValueConfig Parse(std::istream& in, const std::string& origin = "<input>");
  static KeyValueConfig Load(const std::string& path);

  bool Has(const std::string& key) const { return values_.count(key) != 0; }
  void Set(const std::string& key, const std::string& value) { values_[key] = value; }

  // Typed lookups mark the key as consumed. They throw ConfigurationError on
  // values that do not parse completely.
  std::string GetString(const std::string& key, const std::string& fallback) const;
  double GetDouble(const std::string& key, double fallback) const;
  std::uint64_t GetUnsigned(const std::string& key, std::uint64_t fallback) const;
  std::vector<double> GetDoubles(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<std::size_t> GetCounts(const std::string& key,
                                     const std::vector<std::size_t>& fallback) const;

  // Keys never looked up, in sorted order.
  std::vector<std::string> Unconsumed() const;

 private:
  std::optional<std::string> Lookup(const std::string& key) const;

  std::map<std::string, std::string> values_;
  mutable std::set<std::string> consumed_;
};

struct ScenarioConfig {
  std::string name = "hpr";  // hpr | chain | stationary_hog
  double radius = 1.0;
  double box_lower = -2.0;
  double box_upper = 2.0;
  // hpr: one count per player, or one count for all three. chain: a single
  // count. stationary_hog: poacher then ranger.
  std::vector<std::size_t> strategies = {2};
  std::size_t players = 3;  // chain only
  double hog_x = 0.0;       // stationary_hog only
  double hog_y = 0.0;
};

struct ExperimentConfig {
  ScenarioConfig scenario;
  IndicatorMode mode = IndicatorMode::kChance;
  double chance_epsilon = 0.8;
  double expectation_epsilon = 0.0;
  double omega_initial = 1.0;
  double omega_desired = 64.0;
  double omega_min_accept = 10.0;

  double solver_tolerance = 1e-8;
  int solver_max_iterations = 200;
  int solver_max_restarts = 5;
  double solver_perturbation = 0.1;

  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::size_t threads = 0;  // 0 picks the hardware concurrency

  // Range for the uniform initial strategies; defaults to the scenario box.
  std::optional<double> init_lower;
  std::optional<double> init_upper;

  double support_threshold = 1e-3;
  int probe_trials = 1000;

  std::vector<double> sweep_epsilons = {0.2, 0.35, 0.5, 0.65, 0.8};
  std::vector<std::size_t> bench_players = {2, 3, 4, 5};
  std::vector<std::size_t> bench_strategies = {2, 3};
  std::size_t bench_repeats = 10;

  std::string output_dir = "out";

  static ExperimentConfig FromKeyValues(const KeyValueConfig& kv);
  static ExperimentConfig FromFile(const std::string& path);

  double epsilon() const {
    return mode == IndicatorMode::kChance ? chance_epsilon : expectation_epsilon;
  }
  void Validate() const;
};

}  // namespace ccg
