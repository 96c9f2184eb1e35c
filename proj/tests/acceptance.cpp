// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "otaform/commands.hpp"

using namespace otaform;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
  if (!ok) ++failures;
}

template <class F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double mse_ratio(const RunOutputs& r) {
  const auto& m = r.analysis.metrics.mse;
  return m.front() > 0.0 ? m.back() / m.front() : 0.0;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  RunOutputs runs[3];
  double elapsed[3];
  for (int i = 0; i < 3; ++i) elapsed[i] = seconds([&] { runs[i] = execute_scenario(paper_run(i + 1)); });

  {
    const double ratio = mse_ratio(runs[0]);
    const bool ok = runs[0].analysis.verdict == Verdict::Converged && ratio <= 1e-3 && elapsed[0] < 5.0;
    report(ok, "run1_converges", "verdict " + to_string(runs[0].analysis.verdict) + ", mse ratio " + fmt(ratio) +
                                     ", " + fmt(elapsed[0]) + " s");
  }
  report(runs[1].analysis.verdict == Verdict::Diverged, "run2_diverges",
         "verdict " + to_string(runs[1].analysis.verdict) + ", mse ratio " + fmt(mse_ratio(runs[1])));
  {
    const bool ok = runs[2].analysis.verdict == Verdict::Converged && elapsed[2] < 5.0;
    report(ok, "run3_converges", "verdict " + to_string(runs[2].analysis.verdict) + ", mse ratio " +
                                     fmt(mse_ratio(runs[2])) + ", " + fmt(elapsed[2]) + " s");
  }

  {
    // Recount node-to-node channels from the stored matrices alone.
    const SimTrace& t = runs[0].trace;
    std::uint64_t recount = 0;
    for (const auto& r : t.records) {
      if (!r.h) continue;
      for (std::size_t i = 0; i < t.n; ++i) {
        for (std::size_t j = 0; j < t.n; ++j) recount += (i != j && (*r.h)(i, j) > 0.0) ? 2 : 0;
      }
    }
    const auto& ledger = t.records.back().ledger;
    const bool ok = t.updates() == 300 && ledger.ota_count == 900 && ledger.n2n_count == recount &&
                    ledger.n2n_count >= 3000 && ledger.n2n_count <= 18000;
    report(ok, "transmission_accounting", "updates " + std::to_string(t.updates()) + ", ota " +
                                              std::to_string(ledger.ota_count) + ", n2n " +
                                              std::to_string(ledger.n2n_count) + " (recount " + std::to_string(recount) +
                                              ", bracket [3000, 18000])");
  }

  {
    const double a = theorem1_threshold(1, 1, 1, 1);
    const double b = theorem1_threshold(2, 0.5, 0.75, 2);
    const double hand = -2.0 * std::log((std::sqrt(1.75) - 1.0) / 4.0);
    const bool ok = std::abs(a - std::log(2.0)) <= 1e-12 && std::abs(b - hand) <= 1e-6 && std::abs(b - 5.034) < 1e-3;
    report(ok, "sampling_threshold", "T*(1,1,1,1) = " + fmt(a) + ", T*(2,0.5,0.75,2) = " + fmt(b));
  }

  {
    SuiteResult r;
    const double s = seconds([&] { r = suite_lemma1(1, 500); });
    report(r.passed() && r.trials == 500 && s < 10.0, "sigma_window_suite",
           std::to_string(r.violations) + " violations in " + std::to_string(r.trials) + " trials, " + fmt(s) + " s");
  }

  {
    const SuiteResult t = suite_tau1(1, 1000);
    const SuiteResult c = suite_contraction(1, 1000);
    report(t.passed() && c.passed() && t.trials >= 1000 && c.trials >= 1000, "ergodicity_suites",
           "tau1/overlap/submultiplicativity " + std::to_string(t.violations) + " violations, contraction " +
               std::to_string(c.violations) + " violations, 1000 trials each");
  }

  {
    Rng rng(derive_seed(1, "acceptance.first_order"));
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const double lambda = rng.uniform(0.1, 10.0);
      const Vec2 p0(rng.uniform(-10, 10), rng.uniform(-10, 10)), r(rng.uniform(-10, 10), rng.uniform(-10, 10));
      const auto res = integrate_interval(first_order_agent(lambda), StateVector{{p0.x(), p0.y()}}, r, 0.0, 1.0, 1e-3, 100);
      for (const auto& s : res.path) worst = std::max(worst, (s.p - first_order_closed_form(p0, r, lambda, s.t)).norm());
    }
    const SuiteResult u = suite_tracking(1, 100);
    report(worst <= 1e-6 && u.passed(), "tracking_oracle",
           "first-order max error " + fmt(worst) + " m; unicycle " + u.summary);
  }

  {
    ScenarioConfig c = paper_run(2);
    c.init.mode = InitMode::InFormation;
    c.init.center = Vec2(3.0, -2.0);
    c.horizon = 9.9;  // 100 instants
    const SimTrace t = run_scenario(c);
    double worst = 0.0;
    for (const auto& r : t.records) worst = std::max(worst, r.mse);
    report(t.records.size() == 100 && worst <= 1e-12, "fixed_point",
           std::to_string(t.records.size()) + " instants, max mse " + fmt(worst));
  }

  {
    const fs::path base = fs::temp_directory_path() / "otaform_acceptance";
    fs::remove_all(base);
    std::ostringstream log, err;
    const int a = cmd_paper((base / "a").string(), kPaperSeed, log, err);
    const int b = cmd_paper((base / "b").string(), kPaperSeed, log, err);
    bool same = a == 0 && b == 0;
    std::size_t files = 0;
    for (const char* run : {"run1", "run2", "run3"}) {
      for (const char* f : {"trace.csv", "paths.csv"}) {
        const std::string x = slurp(base / "a" / run / f);
        same = same && !x.empty() && x == slurp(base / "b" / run / f);
        ++files;
      }
    }
    report(same, "determinism", std::to_string(files) + " CSV files compared byte for byte");
    fs::remove_all(base);
  }

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
