#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "otaform/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Over-the-air formation control simulator"};
  app.require_subcommand(1);

  std::string config, out = "out";
  std::uint64_t run_seed_value = 0, paper_seed = otaform::kPaperSeed, verify_seed = 1;
  std::size_t trials = 0;
  std::string suite;

  auto* run = app.add_subcommand("run", "simulate one scenario file");
  run->add_option("--config", config, "scenario YAML")->required();
  run->add_option("--out", out, "output directory");
  auto* run_seed = run->add_option("--seed", run_seed_value, "override the scenario seed");

  auto* paper = app.add_subcommand("paper", "reproduce the three reference experiments");
  paper->add_option("--out", out, "output directory");
  paper->add_option("--seed", paper_seed, "master seed")->capture_default_str();

  auto* verify = app.add_subcommand("verify", "run a property suite");
  verify->add_option("name", suite, "suite name");
  verify->add_option("--suite", suite, "suite name");
  verify->add_option("--seed", verify_seed, "master seed")->capture_default_str();
  auto* verify_trials = verify->add_option("--trials", trials, "number of random cases");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : otaform::kExitConfig;
  }

  if (*run) {
    std::optional<std::uint64_t> override;
    if (*run_seed) override = run_seed_value;
    return otaform::cmd_run(config, out, override, std::cout, std::cerr);
  }
  if (*paper) return otaform::cmd_paper(out, paper_seed, std::cout, std::cerr);
  if (suite.empty()) {
    std::cerr << "verify needs a suite name\n";
    return otaform::kExitConfig;
  }
  if (!*verify_trials) trials = suite == "tracking" ? 100 : 1000;
  return otaform::cmd_verify(suite, verify_seed, trials, std::cout, std::cerr);
}
