#pragma once

// Command implementations behind the CLI. Each returns a process exit code:
// 0 success, 1 configuration error, 2 runtime or integration error,
// 3 property violation.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "otaform/config_io.hpp"
#include "otaform/engine.hpp"
#include "otaform/error.hpp"
#include "otaform/properties.hpp"
#include "otaform/report.hpp"
#include "otaform/scenario.hpp"
#include "otaform/trace_io.hpp"

namespace otaform {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitRuntime = 2, kExitViolation = 3 };

struct RunOutputs {
  SimTrace trace;
  TraceAnalysis analysis;
  std::string report;
};

/// Simulates, analyzes and renders; no file I/O.
inline RunOutputs execute_scenario(const ScenarioConfig& config) {
  RunOutputs out;
  out.trace = run_scenario(config);
  out.analysis = analyze_trace(out.trace, analysis_options(config));
  out.report = render_report(out.trace, out.analysis, dump_scenario(config));
  return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

inline void write_run_outputs(const std::filesystem::path& dir, const RunOutputs& run) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream os(dir / "trace.csv", std::ios::binary);
    write_trace_csv(os, run.trace);
  }
  {
    std::ofstream os(dir / "paths.csv", std::ios::binary);
    write_paths_csv(os, run.trace);
  }
  write_text(dir / "report.txt", run.report);
}

inline int cmd_run(const std::string& config_path, const std::string& out_dir, std::optional<std::uint64_t> seed,
                   std::ostream& log, std::ostream& err) {
  ScenarioConfig config;
  try {
    config = load_scenario(config_path);
    if (seed) config.seed = *seed;
  } catch (const ConfigError& e) {
    err << "config error [" << e.key() << "]: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    const RunOutputs run = execute_scenario(config);
    write_run_outputs(out_dir, run);
    log << config.name << ": " << to_string(run.analysis.verdict) << " (" << run.trace.records.size()
        << " instants), outputs in " << out_dir << '\n';
    return kExitOk;
  } catch (const IntegrationError& e) {
    err << "integration error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
  }
  return kExitRuntime;
}

struct PaperRow {
  std::string name;
  double mu_rot = 0.0;
  double period = 0.0;
  Verdict verdict = Verdict::Undecided;
  double mse_ratio = 0.0;
  TransmissionLedger ledger;
  std::size_t n = 0;
};

inline std::string paper_summary(const std::vector<PaperRow>& rows, std::uint64_t seed,
                                 const std::vector<std::pair<std::uint64_t, Verdict>>& sweep) {
  std::ostringstream os;
  os << "# reference experiments, seed " << seed << "\n\n";
  os << std::left << std::setw(6) << "run" << std::setw(12) << "mu_rot" << std::setw(6) << "T" << std::setw(11)
     << "verdict" << std::setw(14) << "mse_ratio" << std::setw(10) << "ota" << std::setw(10) << "n2n"
     << "n2n_bracket\n";
  for (const auto& r : rows) {
    const std::uint64_t u = r.ledger.instants;
    std::ostringstream bracket;
    bracket << '[' << 2 * u * r.n << ", " << 2 * u * r.n * (r.n - 1) << ']';
    os << std::setw(6) << r.name << std::setw(12) << std::setprecision(6) << r.mu_rot << std::setw(6) << r.period
       << std::setw(11) << to_string(r.verdict) << std::setw(14) << std::setprecision(4) << r.mse_ratio
       << std::setw(10) << r.ledger.ota_count << std::setw(10) << r.ledger.n2n_count << bracket.str() << '\n';
  }
  os << "\n# ota = (payload_dim + 1) x updates = 3 U\n"
        "# n2n = sum over updates of 2 x directed links (self-loops excluded);\n"
        "#       bracket = [2 U n, 2 U n (n - 1)] for a cycle up to a complete graph\n";
  os << "\n# run2 verdict by seed\n";
  for (const auto& [s, v] : sweep) os << "seed " << s << ": " << to_string(v) << '\n';
  return os.str();
}

/// Runs the three reference experiments into out_dir/run{1,2,3} and writes
/// summary.txt. The run-2 seed sweep (seeds 1..sweep_seeds) records how much
/// its verdict depends on the seed.
inline int cmd_paper(const std::string& out_dir, std::uint64_t seed, std::ostream& log, std::ostream& err,
                     std::uint64_t sweep_seeds = 10) {
  try {
    std::vector<PaperRow> rows;
    for (int run = 1; run <= 3; ++run) {
      const ScenarioConfig config = paper_run(run, seed);
      const RunOutputs out = execute_scenario(config);
      write_run_outputs(std::filesystem::path(out_dir) / config.name, out);
      PaperRow row;
      row.name = config.name;
      row.mu_rot = config.agents.mu_rot;
      row.period = config.t_min;
      row.verdict = out.analysis.verdict;
      const auto& mse = out.analysis.metrics.mse;
      row.mse_ratio = mse.front() > 0.0 ? mse.back() / mse.front() : 0.0;
      row.ledger = out.trace.records.back().ledger;
      row.n = config.n;
      rows.push_back(row);
      log << config.name << ": " << to_string(row.verdict) << '\n';
    }
    std::vector<std::pair<std::uint64_t, Verdict>> sweep;
    for (std::uint64_t s = 1; s <= sweep_seeds; ++s) {
      const ScenarioConfig config = paper_run(2, s);
      const SimTrace trace = run_scenario(config);
      sweep.emplace_back(s, verdict(trace.times(), trace.mse(), analysis_options(config).verdict));
    }
    const std::string summary = paper_summary(rows, seed, sweep);
    write_text(std::filesystem::path(out_dir) / "summary.txt", summary);
    log << summary;
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error [" << e.key() << "]: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

inline int cmd_verify(const std::string& suite, std::uint64_t seed, std::size_t trials, std::ostream& log,
                      std::ostream& err, const MatrixHook& hook = {}) {
  std::optional<SuiteResult> result;
  try {
    result = run_suite(suite, seed, trials, hook);
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
  if (!result) {
    err << "unknown suite '" << suite << "'; choose one of:";
    for (const auto& name : suite_names()) err << ' ' << name;
    err << '\n';
    return kExitConfig;
  }
  log << result->name << ": " << result->trials << " trials, " << result->violations << " violations\n"
      << "  " << result->summary << '\n';
  if (result->passed()) return kExitOk;
  err << "counterexample:\n" << result->counterexample << '\n';
  return kExitViolation;
}

}  // namespace otaform
