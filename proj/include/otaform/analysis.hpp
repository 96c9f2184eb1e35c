#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "otaform/error.hpp"
#include "otaform/formation.hpp"
#include "otaform/stochastic_matrix.hpp"

namespace otaform {

// ---------------------------------------------------------------------------
// Disagreement metrics
// ---------------------------------------------------------------------------

/// Largest pairwise distance among the planar blocks of a stacked vector.
inline double delta_seminorm(const Eigen::VectorXd& stacked) {
  if (stacked.size() % 2 != 0 || stacked.size() == 0) {
    throw ValidationError("delta_seminorm: expected a non-empty stacked planar vector");
  }
  const Eigen::Index n = stacked.size() / 2;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      worst = std::max(worst, (stacked.segment<2>(2 * i) - stacked.segment<2>(2 * j)).norm());
    }
  }
  return worst;
}

/// Mean squared deviation of the stacked planar blocks from their mean.
inline double stacked_mse(const Eigen::VectorXd& stacked) {
  if (stacked.size() % 2 != 0 || stacked.size() == 0) {
    throw ValidationError("formation_mse: expected a non-empty stacked planar vector");
  }
  const Eigen::Index n = stacked.size() / 2;
  Vec2 mean = Vec2::Zero();
  for (Eigen::Index i = 0; i < n; ++i) mean += stacked.segment<2>(2 * i);
  mean /= static_cast<double>(n);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) acc += (stacked.segment<2>(2 * i) - mean).squaredNorm();
  return acc / static_cast<double>(n);
}

inline double formation_mse(std::span<const Vec2> positions, const FormationSpec& spec) {
  return stacked_mse(shifted_state(positions, spec));
}

// ---------------------------------------------------------------------------
// Convergence conditions
// ---------------------------------------------------------------------------

/// Minimum inter-update time above which exponential tracking with constants
/// (C_hat, lambda_min) guarantees convergence under an (L, mu) mixing
/// certificate. Negative values mean every positive spacing qualifies.
inline double theorem1_threshold(double c_hat, double lambda_min, double mu, std::size_t window) {
  if (!(c_hat > 0.0) || !(lambda_min > 0.0) || !(mu > 0.0 && mu <= 1.0) || window < 1) {
    throw ValidationError("theorem1_threshold: need C > 0, lambda > 0, mu in (0, 1], L >= 1");
  }
  const double gap = std::pow(1.0 + mu, 1.0 / static_cast<double>(window)) - 1.0;
  return -std::log(gap / (2.0 * c_hat)) / lambda_min;
}

/// Right-hand side 1/2 ((1 + sigma_min^L mu)^(1/L) - 1) of the relaxed condition.
inline double theorem2_bound(double sigma_min, double mu, std::size_t window) {
  if (!(sigma_min > 0.0 && sigma_min <= 1.0) || !(mu > 0.0 && mu <= 1.0) || window < 1) {
    throw ValidationError("theorem2_bound: need sigma_min in (0, 1], mu in (0, 1], L >= 1");
  }
  const double l = static_cast<double>(window);
  return 0.5 * (std::pow(1.0 + std::pow(sigma_min, l) * mu, 1.0 / l) - 1.0);
}

/// Largest admissible beta at the smallest segment fraction.
inline double beta_star(double sigma_min, double mu, std::size_t window) {
  return theorem2_bound(sigma_min, mu, window) / sigma_min;
}

struct Theorem2Check {
  double bound = 0.0;         // right-hand side at sigma_min
  double max_product = 0.0;   // max over (i, k) of sigma_{i,k} beta_i
  std::vector<std::vector<double>> products;  // [k][i]
  bool satisfied = false;
};

inline Theorem2Check theorem2_check(const SigmaSchedule& sigmas, std::span<const double> betas,
                                    double mu, std::size_t window) {
  if (betas.size() != sigmas.agents()) throw ValidationError("theorem2_check: one beta per agent required");
  Theorem2Check out;
  out.bound = theorem2_bound(sigmas.sigma_min(), mu, window);
  out.products.resize(sigmas.instants());
  for (std::size_t k = 0; k < sigmas.instants(); ++k) {
    out.products[k].resize(betas.size());
    for (std::size_t i = 0; i < betas.size(); ++i) {
      if (!(betas[i] >= 0.0)) throw ValidationError("theorem2_check: beta must be >= 0");
      const double p = sigmas.at(k, i) * betas[i];
      out.products[k][i] = p;
      out.max_product = std::max(out.max_product, p);
    }
  }
  out.satisfied = out.max_product < out.bound;
  return out;
}

/// beta sigma |p_k - r_{k+}|: how far the end-of-interval position may sit
/// from the segment point.
inline double end_of_interval_radius(double beta, double sigma, const Vec2& p_k, const Vec2& r_kplus) {
  return beta * sigma * (p_k - r_kplus).norm();
}

// ---------------------------------------------------------------------------
// Verdicts
// ---------------------------------------------------------------------------

enum class Verdict { Converged, Diverged, Undecided };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Converged: return "converged";
    case Verdict::Diverged: return "diverged";
    case Verdict::Undecided: return "undecided";
  }
  return "undecided";
}

struct VerdictRule {
  double converged_ratio = 1e-3;
  std::size_t min_instants = 10;
  double zero_floor = 1e-12;  // an MSE at or below this counts as exact formation (m^2)
};

/// Least-squares slope of y against t.
inline double ls_slope(std::span<const double> t, std::span<const double> y) {
  const auto m = static_cast<double>(t.size());
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sy += y[i];
    stt += t[i] * t[i];
    sty += t[i] * y[i];
  }
  const double var = stt - st * st / m;
  return var > 0.0 ? (sty - st * sy / m) / var : 0.0;
}

/// Empirical outcome from the MSE series at the communication instants.
inline Verdict verdict(std::span<const double> times, std::span<const double> mse,
                       const VerdictRule& rule = {}) {
  if (times.size() != mse.size()) throw ValidationError("verdict: times and mse differ in length");
  if (mse.size() < rule.min_instants) {
    throw ValidationError("verdict: need at least " + std::to_string(rule.min_instants) + " instants");
  }
  const double first = mse.front();
  const double last = mse.back();
  if (last <= rule.zero_floor || last <= rule.converged_ratio * first) return Verdict::Converged;
  if (last >= first) {
    const std::size_t start = mse.size() - std::max<std::size_t>(2, mse.size() / 4);
    if (ls_slope(times.subspan(start), mse.subspan(start)) > 0.0) return Verdict::Diverged;
  }
  return Verdict::Undecided;
}

}  // namespace otaform
