#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "otaform/commands.hpp"

using namespace otaform;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("otaform_test_" + name);
  fs::remove_all(dir);
  return dir;
}

const std::string kConfigs = OTAFORM_CONFIG_DIR;

}  // namespace

TEST(BundledConfigs, MatchTheReferenceRuns) {
  for (int run = 1; run <= 3; ++run) {
    const ScenarioConfig file = load_scenario(kConfigs + "/run" + std::to_string(run) + ".cfg");
    EXPECT_EQ(dump_scenario(file), dump_scenario(paper_run(run))) << "run " << run;
  }
}

TEST(CmdRun, ProducesFilesAndConvergedVerdict) {
  const fs::path out = scratch("run1");
  std::ostringstream log, err;
  ASSERT_EQ(cmd_run(kConfigs + "/run1.cfg", out.string(), std::nullopt, log, err), kExitOk) << err.str();
  for (const char* f : {"trace.csv", "paths.csv", "report.txt"}) EXPECT_TRUE(fs::exists(out / f)) << f;
  EXPECT_NE(slurp(out / "report.txt").find("verdict = converged"), std::string::npos);
  fs::remove_all(out);
}

TEST(CmdRun, InvalidConfigWritesNothing) {
  const fs::path dir = scratch("bad_cfg");
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "bad.cfg");
    cfg << "schedule:\n  mode: random\n  t_min: 0.5\n  t_max: 0.2\n";
  }
  const fs::path out = dir / "out";
  std::ostringstream log, err;
  EXPECT_EQ(cmd_run((dir / "bad.cfg").string(), out.string(), std::nullopt, log, err), kExitConfig);
  EXPECT_NE(err.str().find("schedule.t_max"), std::string::npos) << err.str();
  EXPECT_FALSE(fs::exists(out));
  EXPECT_EQ(cmd_run((dir / "missing.cfg").string(), out.string(), std::nullopt, log, err), kExitConfig);
  EXPECT_FALSE(fs::exists(out));
  fs::remove_all(dir);
}

TEST(CmdRun, SeedOverrideIsDeterministic) {
  const fs::path dir = scratch("seed7");
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "short.cfg");
    cfg << "horizon: 2\n";
  }
  std::ostringstream log, err;
  ASSERT_EQ(cmd_run((dir / "short.cfg").string(), (dir / "a").string(), 7, log, err), kExitOk);
  ASSERT_EQ(cmd_run((dir / "short.cfg").string(), (dir / "b").string(), 7, log, err), kExitOk);
  ASSERT_EQ(cmd_run((dir / "short.cfg").string(), (dir / "c").string(), 8, log, err), kExitOk);
  for (const char* f : {"trace.csv", "paths.csv", "report.txt"}) EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  EXPECT_NE(slurp(dir / "a" / "trace.csv"), slurp(dir / "c" / "trace.csv"));
  EXPECT_NE(slurp(dir / "a" / "report.txt").find("seed: 7"), std::string::npos);
  fs::remove_all(dir);
}

TEST(CmdVerify, SuitesPassAndUnknownIsRejected) {
  std::ostringstream log, err;
  EXPECT_EQ(cmd_verify("lemma1", 1, 500, log, err), kExitOk) << err.str();
  EXPECT_EQ(cmd_verify("seminorm", 1, 1000, log, err), kExitOk) << err.str();
  EXPECT_EQ(cmd_verify("hull", 1, 200, log, err), kExitOk) << err.str();
  EXPECT_NE(cmd_verify("spectral", 1, 10, log, err), kExitOk);
}

TEST(CmdVerify, CorruptedMatrixInjectionIsReported) {
  // Flip one entry negative: row sums survive, nonnegativity does not.
  const MatrixHook corrupt = [](Eigen::MatrixXd& m) {
    m(0, 0) -= 0.3;
    m(0, 1) += 0.3;
  };
  for (const char* suite : {"tau1", "contraction", "lemma1"}) {
    std::ostringstream log, err;
    EXPECT_EQ(cmd_verify(suite, 1, 50, log, err, corrupt), kExitViolation) << suite;
    EXPECT_NE(err.str().find("counterexample"), std::string::npos);
    EXPECT_NE(err.str().find("invalid matrix"), std::string::npos);
  }
}
