#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "otaform/agents.hpp"
#include "otaform/analysis.hpp"
#include "otaform/engine.hpp"
#include "otaform/stochastic_matrix.hpp"

namespace otaform {

struct AnalysisOptions {
  double sigma_step = 0.05;
  std::size_t mixing_window = 0;  // 0 selects n - 1
  double skip_radius = 1e-6;      // intervals starting this close to the reference need no certificate
  VerdictRule verdict;
};

inline AnalysisOptions analysis_options(const ScenarioConfig& config) {
  AnalysisOptions o;
  o.sigma_step = config.analysis.sigma_step;
  o.mixing_window = config.mixing_window();
  o.verdict.converged_ratio = config.analysis.verdict_ratio;
  double skip = 0.0;
  for (std::size_t i = 0; i < config.n; ++i) skip = std::max(skip, config.agent(i).deadband);
  o.skip_radius = skip;
  return o;
}

/// Fitted certificates for one agent on one flow interval. Both are empty
/// for trivial intervals (agent already at its reference) and for intervals
/// where no decaying envelope exists.
struct IntervalCertificates {
  bool trivial = false;
  std::optional<TrackingCertificate> unit;  // sigma fixed to 1
  std::optional<TrackingCertificate> best;  // sigma from the grid search
};

struct TheoremReport {
  double t_check = 0.0;  // smallest spacing between instants
  MixingCertificate mixing;

  // Exponential tracking toward the reference itself (sigma = 1).
  std::vector<double> agent_c;
  std::vector<double> agent_lambda;
  std::vector<double> beta;  // C_i exp(-lambda_i T)
  double c_hat = 0.0;
  double lambda_min = 0.0;
  double beta_hat = 0.0;
  double t_star = std::numeric_limits<double>::quiet_NaN();
  bool theorem1_satisfied = false;

  // Relaxed tracking toward a segment point.
  std::vector<double> segment_beta;                // beta_i over the grid-search certificates
  std::vector<std::vector<double>> sigma_beta;     // [k][i]
  double sigma_min = 1.0;
  double max_sigma_beta = 0.0;
  double theorem2_bound = std::numeric_limits<double>::quiet_NaN();
  bool theorem2_satisfied = false;
  double beta_star = std::numeric_limits<double>::quiet_NaN();

  std::size_t uncertified_intervals = 0;
};

struct MetricsSeries {
  std::vector<double> times;
  std::vector<double> delta;
  std::vector<double> mse;
};

struct TraceAnalysis {
  std::vector<std::vector<IntervalCertificates>> certificates;  // [k][i]
  TheoremReport theorems;
  MetricsSeries metrics;
  Verdict verdict = Verdict::Undecided;
};

inline TraceAnalysis analyze_trace(const SimTrace& trace, const AnalysisOptions& options = {}) {
  TraceAnalysis out;
  const std::size_t n = trace.n;
  for (const auto& r : trace.records) {
    out.metrics.times.push_back(r.t);
    out.metrics.delta.push_back(r.delta);
    out.metrics.mse.push_back(r.mse);
  }
  if (out.metrics.mse.size() >= options.verdict.min_instants) {
    out.verdict = verdict(out.metrics.times, out.metrics.mse, options.verdict);
  }

  TheoremReport& rep = out.theorems;
  rep.t_check = trace.min_gap();
  const std::size_t window = options.mixing_window > 0 ? options.mixing_window : default_mixing_window(n);
  const auto hs = trace.matrices();
  if (hs.size() >= window) {
    rep.mixing = certify_mixing(hs, window);
  } else {
    rep.mixing = MixingCertificate{window, 0.0, 0};
  }

  FitOptions fit;
  fit.sigma_step = options.sigma_step;
  fit.horizon = rep.t_check;

  rep.agent_c.assign(n, 1.0);
  rep.agent_lambda.assign(n, std::numeric_limits<double>::infinity());
  rep.segment_beta.assign(n, 0.0);
  std::vector<std::vector<double>> sigmas;
  bool unit_ok = true;
  bool best_ok = true;

  out.certificates.resize(trace.updates());
  for (std::size_t k = 0; k < trace.updates(); ++k) {
    out.certificates[k].resize(n);
    sigmas.emplace_back(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& p0 = trace.records[k].positions[i];
      const Vec2& r = trace.records[k].refs[i];
      auto& cell = out.certificates[k][i];
      if ((p0 - r).norm() <= options.skip_radius) {
        cell.trivial = true;
        continue;
      }
      const auto& path = trace.paths[k][i];
      cell.unit = fit_certificate_at(path, p0, r, 1.0, fit);
      cell.best = fit_certificate(path, p0, r, fit);
      if (cell.unit) {
        rep.agent_c[i] = std::max(rep.agent_c[i], cell.unit->C);
        rep.agent_lambda[i] = std::min(rep.agent_lambda[i], cell.unit->lambda);
      } else {
        unit_ok = false;
      }
      if (cell.best) {
        sigmas[k][i] = cell.best->sigma;
        rep.segment_beta[i] = std::max(rep.segment_beta[i], cell.best->beta(rep.t_check));
      } else {
        best_ok = false;
      }
      if (!cell.unit || !cell.best) ++rep.uncertified_intervals;
    }
  }

  // Agents that never left their reference contribute nothing.
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(rep.agent_lambda[i])) rep.agent_lambda[i] = 0.0;
  }
  rep.beta.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rep.beta[i] = rep.agent_lambda[i] > 0.0 ? rep.agent_c[i] * std::exp(-rep.agent_lambda[i] * rep.t_check) : 0.0;
  }
  rep.c_hat = *std::max_element(rep.agent_c.begin(), rep.agent_c.end());
  rep.beta_hat = *std::max_element(rep.beta.begin(), rep.beta.end());
  double lambda_min = std::numeric_limits<double>::infinity();
  for (double l : rep.agent_lambda) {
    if (l > 0.0) lambda_min = std::min(lambda_min, l);
  }
  rep.lambda_min = std::isfinite(lambda_min) ? lambda_min : 0.0;

  const bool mixing_ok = rep.mixing.certified();
  if (mixing_ok && unit_ok && rep.lambda_min > 0.0) {
    rep.t_star = theorem1_threshold(rep.c_hat, rep.lambda_min, std::min(1.0, rep.mixing.contraction_margin),
                                    window);
    rep.theorem1_satisfied = rep.t_check > rep.t_star;
  }

  if (!sigmas.empty()) {
    const SigmaSchedule schedule(sigmas);
    rep.sigma_min = schedule.sigma_min();
    if (mixing_ok) {
      const auto check = theorem2_check(schedule, rep.segment_beta, std::min(1.0, rep.mixing.contraction_margin), window);
      rep.sigma_beta = check.products;
      rep.max_sigma_beta = check.max_product;
      rep.theorem2_bound = check.bound;
      rep.theorem2_satisfied = best_ok && check.satisfied;
      rep.beta_star = beta_star(rep.sigma_min, std::min(1.0, rep.mixing.contraction_margin), window);
    }
  }
  return out;
}

namespace detail {
inline std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace detail

/// Plain-text report. Everything below the scenario echo derives from the
/// trace and the analysis options only.
inline std::string render_report(const SimTrace& trace, const TraceAnalysis& a, const std::string& scenario_echo) {
  using detail::num;
  std::ostringstream os;
  const auto& t = a.theorems;
  os << "# formation run report\n\n";
  os << "[scenario]\n" << scenario_echo;
  if (!scenario_echo.empty() && scenario_echo.back() != '\n') os << '\n';

  os << "\n[outcome]\n";
  os << "verdict = " << to_string(a.verdict) << '\n';
  os << "instants = " << trace.records.size() << '\n';
  os << "updates = " << trace.updates() << '\n';
  if (!a.metrics.mse.empty()) {
    os << "mse_initial = " << num(a.metrics.mse.front()) << '\n';
    os << "mse_final = " << num(a.metrics.mse.back()) << '\n';
    os << "mse_ratio = " << num(a.metrics.mse.front() > 0 ? a.metrics.mse.back() / a.metrics.mse.front() : 0.0) << '\n';
    os << "delta_initial = " << num(a.metrics.delta.front()) << '\n';
    os << "delta_final = " << num(a.metrics.delta.back()) << '\n';
  }

  os << "\n[transmissions]\n";
  const TransmissionLedger ledger = trace.records.empty() ? TransmissionLedger{} : trace.records.back().ledger;
  const std::size_t n = trace.n;
  os << "ota_count = " << ledger.ota_count << "  # (payload_dim + 1) per update\n";
  os << "n2n_count = " << ledger.n2n_count << "  # 2 x directed links (self-loops excluded) per update\n";
  os << "n2n_bracket = [" << 2 * ledger.instants * n << ", " << 2 * ledger.instants * n * (n - 1)
     << "]  # n to n(n-1) links per update\n";

  os << "\n[mixing]\n";
  os << "window_length = " << t.mixing.window_length << '\n';
  os << "contraction_margin = " << num(t.mixing.contraction_margin) << '\n';
  os << "certified = " << (t.mixing.certified() ? "true" : "false") << '\n';

  os << "\n[sampling_condition]\n";
  os << "t_check = " << num(t.t_check) << '\n';
  os << "c_hat = " << num(t.c_hat) << '\n';
  os << "lambda_min = " << num(t.lambda_min) << '\n';
  os << "beta_hat = " << num(t.beta_hat) << '\n';
  for (std::size_t i = 0; i < t.beta.size(); ++i) {
    os << "agent" << i << " = C " << num(t.agent_c[i]) << ", lambda " << num(t.agent_lambda[i]) << ", beta "
       << num(t.beta[i]) << '\n';
  }
  os << "t_star = " << num(t.t_star) << '\n';
  os << "satisfied = " << (t.theorem1_satisfied ? "true" : "false") << '\n';

  os << "\n[relaxed_condition]\n";
  os << "sigma_min = " << num(t.sigma_min) << '\n';
  for (std::size_t i = 0; i < t.segment_beta.size(); ++i) os << "beta" << i << " = " << num(t.segment_beta[i]) << '\n';
  os << "max_sigma_beta = " << num(t.max_sigma_beta) << '\n';
  os << "bound = " << num(t.theorem2_bound) << '\n';
  os << "beta_star = " << num(t.beta_star) << '\n';
  os << "satisfied = " << (t.theorem2_satisfied ? "true" : "false") << '\n';
  os << "uncertified_intervals = " << t.uncertified_intervals << '\n';

  os << "\n# The theorems give sufficient conditions only; an unsatisfied condition\n"
        "# does not predict divergence.\n";
  return os.str();
}

}  // namespace otaform
