// Runs the ccg binary end to end; the path comes from the build.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ccg_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path WriteConfig(const std::string& text) {
    const fs::path path = dir_ / "run.cfg";
    std::ofstream(path) << text;
    return path;
  }

  int Run(const std::string& args) {
    const std::string cmd = std::string(CCG_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static std::string Slurp(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

constexpr const char* kSmall = "run.trials = 3\nevaluation.probe_trials = 20\n";

TEST_F(CliTest, SolveWritesAllOutputs) {
  const fs::path cfg = WriteConfig(kSmall);
  ASSERT_EQ(Run("solve --config " + cfg.string() + " --seed 3 --out " + (dir_ / "o").string()), 0);
  for (const char* name : {"solution.json", "trials.csv", "summary.csv"}) {
    EXPECT_TRUE(fs::exists(dir_ / "o" / name)) << name;
  }
}

TEST_F(CliTest, BulkIsByteIdenticalAcrossRuns) {
  const fs::path cfg = WriteConfig(kSmall);
  const std::string base = "bulk --config " + cfg.string() + " --seed 11 --trials 3 --out ";
  ASSERT_EQ(Run(base + (dir_ / "a").string()), 0);
  ASSERT_EQ(Run(base + (dir_ / "b").string() + " --threads 2"), 0);
  for (const char* name : {"trials.csv", "summary.csv"}) {
    const std::string a = Slurp(dir_ / "a" / name);
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, Slurp(dir_ / "b" / name)) << name;
  }
}

TEST_F(CliTest, ConfigErrorsExitWithOne) {
  EXPECT_EQ(Run("bulk --config " + (dir_ / "missing.cfg").string()), 1);
  EXPECT_EQ(Run("bulk --config " + WriteConfig("mystery.key = 1\n").string()), 1);
  EXPECT_EQ(Run("bulk --config " + WriteConfig("chance.epsilon = 2\n").string()), 1);
  EXPECT_EQ(Run("bulk --trials lots"), 1);
  EXPECT_EQ(Run("teleport"), 1);
}

TEST_F(CliTest, AllTrialsFailingExitsWithTwo) {
  const fs::path cfg = WriteConfig(
      "run.trials = 2\nevaluation.probe_trials = 0\nsolver.max_iterations = 1\n"
      "solver.max_restarts = 1\n");
  EXPECT_EQ(Run("bulk --config " + cfg.string() + " --out " + (dir_ / "o").string()), 2);
  EXPECT_TRUE(fs::exists(dir_ / "o" / "trials.csv"));
}

TEST_F(CliTest, SweepsAndBenchRun) {
  const fs::path cfg = WriteConfig(
      "evaluation.probe_trials = 0\nsweep.epsilons = 0.3, 0.7\nbench.players = 2\n"
      "bench.strategies = 2\n");
  EXPECT_EQ(Run("sweep-eps --config " + cfg.string() + " --trials 2 --out " + (dir_ / "e").string()), 0);
  EXPECT_NE(Slurp(dir_ / "e" / "summary.csv").find("\n0.7,"), std::string::npos);
  EXPECT_EQ(Run("sweep-omega --config " + cfg.string() + " --trials 2 --out " + (dir_ / "w").string()), 0);
  EXPECT_TRUE(fs::exists(dir_ / "w" / "sweep_omega.csv"));
  EXPECT_EQ(Run("bench --config " + cfg.string() + " --trials 2 --out " + (dir_ / "b").string()), 0);
  EXPECT_TRUE(fs::exists(dir_ / "b" / "bench.csv"));
}

}  // namespace
