#include "ccg/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

namespace ccg {
namespace {

std::string Trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) items.push_back(Trim(item));
  return items;
}

double ParseDouble(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigurationError(key + ": expected a number, got '" + text + "'");
}

std::uint64_t ParseUnsigned(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigurationError(key + ": expected a nonnegative integer, got '" + text + "'");
  }
  return v;
}

}  // namespace

KeyValueConfig KeyValueConfig::Parse(std::istream& in, const std::string& origin) {
  KeyValueConfig cfg;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string text = Trim(line);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    const std::string where = origin + ":" + std::to_string(number);
    if (eq == std::string::npos) throw ConfigurationError(where + ": expected key = value");
    const std::string key = Trim(text.substr(0, eq));
    const std::string value = Trim(text.substr(eq + 1));
    if (key.empty()) throw ConfigurationError(where + ": empty key");
    if (cfg.values_.count(key)) throw ConfigurationError(where + ": duplicate key " + key);
    cfg.values_[key] = value;
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot read config file " + path);
  return Parse(in, path);
}

std::optional<std::string> KeyValueConfig::Lookup(const std::string& key) const {
  consumed_.insert(key);
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueConfig::GetString(const std::string& key, const std::string& fallback) const {
  return Lookup(key).value_or(fallback);
}

double KeyValueConfig::GetDouble(const std::string& key, double fallback) const {
  const auto v = Lookup(key);
  return v ? ParseDouble(key, *v) : fallback;
}

std::uint64_t KeyValueConfig::GetUnsigned(const std::string& key, std::uint64_t fallback) const {
  const auto v = Lookup(key);
  return v ? ParseUnsigned(key, *v) : fallback;
}

std::vector<double> KeyValueConfig::GetDoubles(const std::string& key,
                                               const std::vector<double>& fallback) const {
  const auto v = Lookup(key);
  if (!v) return fallback;
  std::vector<double> out;
  for (const std::string& item : SplitList(*v)) out.push_back(ParseDouble(key, item));
  if (out.empty()) throw ConfigurationError(key + ": empty list");
  return out;
}

std::vector<std::size_t> KeyValueConfig::GetCounts(const std::string& key,
                                                   const std::vector<std::size_t>& fallback) const {
  const auto v = Lookup(key);
  if (!v) return fallback;
  std::vector<std::size_t> out;
  for (const std::string& item : SplitList(*v)) {
    out.push_back(static_cast<std::size_t>(ParseUnsigned(key, item)));
  }
  if (out.empty()) throw ConfigurationError(key + ": empty list");
  return out;
}

std::vector<std::string> KeyValueConfig::Unconsumed() const {
  std::vector<std::string> keys;
  for (const auto& [key, value] : values_) {
    if (!consumed_.count(key)) keys.push_back(key);
  }
  return keys;
}

ExperimentConfig ExperimentConfig::FromKeyValues(const KeyValueConfig& kv) {
  ExperimentConfig c;
  ScenarioConfig& s = c.scenario;
  s.name = kv.GetString("scenario.name", s.name);
  s.radius = kv.GetDouble("scenario.radius", s.radius);
  s.box_lower = kv.GetDouble("scenario.box_lower", s.box_lower);
  s.box_upper = kv.GetDouble("scenario.box_upper", s.box_upper);
  if (s.name == "stationary_hog") s.strategies = {3, 2};
  s.strategies = kv.GetCounts("scenario.strategies", s.strategies);
  s.players = kv.GetUnsigned("scenario.players", s.players);
  s.hog_x = kv.GetDouble("scenario.hog_x", s.hog_x);
  s.hog_y = kv.GetDouble("scenario.hog_y", s.hog_y);

  const std::string mode = kv.GetString("constraint.mode", "chance");
  if (mode == "chance") {
    c.mode = IndicatorMode::kChance;
  } else if (mode == "expectation") {
    c.mode = IndicatorMode::kExpectation;
  } else {
    throw ConfigurationError("constraint.mode must be chance or expectation, got '" + mode + "'");
  }
  c.chance_epsilon = kv.GetDouble("chance.epsilon", c.chance_epsilon);
  c.expectation_epsilon = kv.GetDouble("expectation.epsilon", c.expectation_epsilon);

  c.omega_initial = kv.GetDouble("tightening.omega_initial", c.omega_initial);
  c.omega_desired = kv.GetDouble("tightening.omega_desired", c.omega_desired);
  c.omega_min_accept = kv.GetDouble("tightening.omega_min_accept", c.omega_min_accept);

  c.solver_tolerance = kv.GetDouble("solver.tolerance", c.solver_tolerance);
  c.solver_max_iterations =
      static_cast<int>(kv.GetUnsigned("solver.max_iterations", c.solver_max_iterations));
  c.solver_max_restarts =
      static_cast<int>(kv.GetUnsigned("solver.max_restarts", c.solver_max_restarts));
  c.solver_perturbation = kv.GetDouble("solver.perturbation", c.solver_perturbation);

  c.trials = kv.GetUnsigned("run.trials", c.trials);
  c.seed = kv.GetUnsigned("run.seed", c.seed);
  c.threads = kv.GetUnsigned("run.threads", c.threads);

  if (kv.Has("init.strategy_lower")) c.init_lower = kv.GetDouble("init.strategy_lower", 0.0);
  if (kv.Has("init.strategy_upper")) c.init_upper = kv.GetDouble("init.strategy_upper", 0.0);

  c.support_threshold = kv.GetDouble("evaluation.support_threshold", c.support_threshold);
  c.probe_trials = static_cast<int>(kv.GetUnsigned("evaluation.probe_trials", c.probe_trials));

  c.sweep_epsilons = kv.GetDoubles("sweep.epsilons", c.sweep_epsilons);
  c.bench_players = kv.GetCounts("bench.players", c.bench_players);
  c.bench_strategies = kv.GetCounts("bench.strategies", c.bench_strategies);
  c.bench_repeats = kv.GetUnsigned("bench.repeats", c.bench_repeats);

  c.output_dir = kv.GetString("output.dir", c.output_dir);

  const std::vector<std::string> unknown = kv.Unconsumed();
  if (!unknown.empty()) throw ConfigurationError("unknown config key " + unknown.front());
  c.Validate();
  return c;
}

ExperimentConfig ExperimentConfig::FromFile(const std::string& path) {
  return FromKeyValues(KeyValueConfig::Load(path));
}

void ExperimentConfig::Validate() const {
  if (scenario.name != "hpr" && scenario.name != "chain" && scenario.name != "stationary_hog") {
    throw ConfigurationError("unknown scenario '" + scenario.name + "'");
  }
  if (trials < 1) throw ConfigurationError("run.trials must be at least 1");
  if (mode == IndicatorMode::kChance && !(chance_epsilon >= 0.0 && chance_epsilon <= 1.0)) {
    throw ConfigurationError("chance.epsilon must lie in [0, 1]");
  }
  for (double e : sweep_epsilons) {
    if (!(e >= 0.0 && e <= 1.0)) throw ConfigurationError("sweep.epsilons must lie in [0, 1]");
  }
  if (!(omega_initial > 0.0) || !(omega_initial <= omega_desired) ||
      !(omega_min_accept <= omega_desired)) {
    throw ConfigurationError("need 0 < omega_initial <= omega_desired and omega_min_accept <= omega_desired");
  }
  if (!(support_threshold > 0.0 && support_threshold <= 1e-3)) {
    throw ConfigurationError("evaluation.support_threshold must lie in (0, 1e-3]");
  }
  const double lo = init_lower.value_or(scenario.box_lower);
  const double hi = init_upper.value_or(scenario.box_upper);
  if (!(lo <= hi) || lo < scenario.box_lower || hi > scenario.box_upper) {
    throw ConfigurationError("initial strategy range must lie inside the strategy box");
  }
  if (bench_repeats < 1) throw ConfigurationError("bench.repeats must be at least 1");
  for (std::size_t n : bench_players) {
    if (n < 2) throw ConfigurationError("bench.players entries must be at least 2");
  }
  for (std::size_t m : bench_strategies) {
    if (m < 2) throw ConfigurationError("bench.strategies entries must be at least 2");
  }
}

}  // namespace ccg
