#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "otaform/error.hpp"
#include "otaform/topology_channel.hpp"

namespace otaform {

using StateVector = Eigen::VectorXd;

/// Closed-loop agent description: dynamics f(t, x, u), position output g(t, x)
/// and a tracking controller that reads only the agent's own state and its
/// held reference.
struct AgentModel {
  std::string kind;
  std::size_t state_dim = 0;
  std::size_t input_dim = 0;
  std::function<StateVector(double, const StateVector&, const StateVector&)> dynamics;
  std::function<Vec2(double, const StateVector&)> output;
  std::function<StateVector(double, const StateVector&, const Vec2&)> controller;

  StateVector closed_loop(double t, const StateVector& x, const Vec2& reference) const {
    return dynamics(t, x, controller(t, x, reference));
  }
};

// ---------------------------------------------------------------------------
// Unicycle
// ---------------------------------------------------------------------------

struct UnicycleState {
  double x = 0.0;      // m
  double y = 0.0;      // m
  double theta = 0.0;  // rad, unwrapped

  Vec2 position() const { return {x, y}; }

  /// Heading wrapped to [0, 2 pi).
  double heading() const {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double h = std::fmod(theta, two_pi);
    if (h < 0.0) h += two_pi;
    return h >= two_pi ? 0.0 : h;
  }

  StateVector to_vector() const { return StateVector{{x, y, theta}}; }
  static UnicycleState from_vector(const StateVector& v) { return {v(0), v(1), v(2)}; }
};

/// How the turn rate is extracted from the offset-point vector field F.
/// PaperLiteral projects F on the heading e (duplicating the longitudinal
/// component); Perpendicular projects on J e, which makes the offset point
/// obey qdot = F exactly.
enum class ControllerVariant { PaperLiteral, Perpendicular };

inline std::string to_string(ControllerVariant v) {
  return v == ControllerVariant::PaperLiteral ? "paper_literal" : "perpendicular";
}

struct ControllerParams {
  double gamma = 1.0;       // 1/s, contraction gain
  double mu_rot = 0.0;      // 1/s, rotation gain
  double kappa_eps = 0.9;   // offset ratio in (0, 1)
  double deadband = 1e-6;   // m
  ControllerVariant variant = ControllerVariant::Perpendicular;

  void validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ValidationError("controller gamma must be > 0");
    if (!std::isfinite(mu_rot)) throw ValidationError("controller mu_rot must be finite");
    if (!(kappa_eps > 0.0 && kappa_eps < 1.0)) throw ValidationError("controller kappa_eps must lie in (0, 1)");
    if (!(deadband > 0.0)) throw ValidationError("controller deadband must be > 0");
  }
};

struct UnicycleInput {
  double v = 0.0;      // m/s
  double omega = 0.0;  // rad/s
};

/// Feedback linearization about the offset point q = p + eps e with
/// eps = kappa_eps |p - r|. The field F(z) = -gamma z + mu_rot J z is applied to
/// z = q - r. Inside the deadband both inputs are zero (eps vanishes at r).
inline UnicycleInput unicycle_control(const UnicycleState& s, const Vec2& r, const ControllerParams& params) {
  const Vec2 diff = s.position() - r;
  const double dist = diff.norm();
  if (dist <= params.deadband) return {};

  const Vec2 e{std::cos(s.theta), std::sin(s.theta)};
  const Vec2 je{-e.y(), e.x()};
  const double eps = params.kappa_eps * dist;
  const Vec2 z = s.position() + eps * e - r;
  const Vec2 jz{-z.y(), z.x()};
  const Vec2 f = -params.gamma * z + params.mu_rot * jz;

  // Lies in [1 - kappa, 1 + kappa], positive for kappa < 1.
  const double denom = 1.0 + params.kappa_eps * e.dot(diff) / dist;
  if (!(denom > 0.0)) throw ValidationError("unicycle_control: non-positive speed denominator");

  UnicycleInput u;
  u.v = e.dot(f) / denom;
  u.omega = (params.variant == ControllerVariant::Perpendicular ? je.dot(f) : e.dot(f)) / eps;
  return u;
}

inline UnicycleState unicycle_derivative(const UnicycleState& s, double v, double omega) {
  return {v * std::cos(s.theta), v * std::sin(s.theta), omega};
}

inline AgentModel unicycle_agent(const ControllerParams& params) {
  params.validate();
  AgentModel m;
  m.kind = "unicycle";
  m.state_dim = 3;
  m.input_dim = 2;
  m.dynamics = [](double, const StateVector& x, const StateVector& u) {
    return unicycle_derivative(UnicycleState::from_vector(x), u(0), u(1)).to_vector();
  };
  m.output = [](double, const StateVector& x) { return Vec2{x(0), x(1)}; };
  m.controller = [params](double, const StateVector& x, const Vec2& r) {
    const auto u = unicycle_control(UnicycleState::from_vector(x), r, params);
    return StateVector{{u.v, u.omega}};
  };
  return m;
}

// ---------------------------------------------------------------------------
// First-order reference agent: pdot = lambda (r - p)
// ---------------------------------------------------------------------------

inline AgentModel first_order_agent(double lambda) {
  if (!(lambda > 0.0)) throw ValidationError("first_order_agent: lambda must be > 0");
  AgentModel m;
  m.kind = "first_order";
  m.state_dim = 2;
  m.input_dim = 2;
  m.dynamics = [](double, const StateVector&, const StateVector& u) { return u; };
  m.output = [](double, const StateVector& x) { return Vec2{x(0), x(1)}; };
  m.controller = [lambda](double, const StateVector& x, const Vec2& r) {
    return StateVector{{lambda * (r.x() - x(0)), lambda * (r.y() - x(1))}};
  };
  return m;
}

/// p(t) = r + exp(-lambda (t - tau)) (p(tau) - r)
inline Vec2 first_order_closed_form(const Vec2& p0, const Vec2& r, double lambda, double elapsed) {
  return r + std::exp(-lambda * elapsed) * (p0 - r);
}

// ---------------------------------------------------------------------------
// Tracking certificates
// ---------------------------------------------------------------------------

/// Witness that |p(t) - s| <= C exp(-lambda (t - tau)) |p(tau) - s| on a flow
/// interval, with segment point s = (1 - sigma) p(tau) + sigma r.
struct TrackingCertificate {
  double C = 1.0;       // >= 1
  double lambda = 0.0;  // 1/s
  double sigma = 1.0;   // (0, 1]

  /// C exp(-lambda T)
  double beta(double horizon) const { return C * std::exp(-lambda * horizon); }
};

/// One point of a flow path; t is measured from the start of the interval.
struct PathSample {
  double t = 0.0;
  Vec2 p = Vec2::Zero();
};

struct FitOptions {
  double sigma_step = 0.05;
  double horizon = -1.0;    // T used in the objective; <= 0 means the last sample time
  double min_decay = 1e-9;  // fitted rates at or below this are "not decaying"
};

inline Vec2 segment_point(const Vec2& p0, const Vec2& r, double sigma) {
  return (1.0 - sigma) * p0 + sigma * r;
}

/// True if the certificate's envelope dominates every sample (relative slack `tol`).
inline bool certificate_holds(const TrackingCertificate& cert, std::span<const PathSample> path,
                              const Vec2& p0, const Vec2& r, double tol = 1e-9) {
  const Vec2 s = segment_point(p0, r, cert.sigma);
  const double d0 = (p0 - s).norm();
  for (const auto& sample : path) {
    const double bound = cert.C * std::exp(-cert.lambda * sample.t) * d0;
    if ((sample.p - s).norm() > bound * (1.0 + tol) + tol * d0) return false;
  }
  return true;
}

namespace detail {
inline void check_fit_inputs(std::span<const PathSample> path, const Vec2& p0, const Vec2& r) {
  if (path.size() < 3) throw ValidationError("certificate fit needs at least 3 samples");
  if (!((p0 - r).norm() > 0.0)) throw ValidationError("certificate fit needs p0 != r");
}
}  // namespace detail

/// Fit (C, lambda) for one fixed sigma. Least squares on the log of the
/// distance-ratio envelope gives the rate; C is then inflated until the envelope dominates every
/// sample. Returns nullopt when the fitted rate is not positive.
inline std::optional<TrackingCertificate> fit_certificate_at(std::span<const PathSample> path,
                                                             const Vec2& p0, const Vec2& r,
                                                             double sigma,
                                                             const FitOptions& options = {}) {
  detail::check_fit_inputs(path, p0, r);
  if (!(sigma > 0.0 && sigma <= 1.0)) throw ValidationError("certificate sigma outside (0, 1]");
  const Vec2 s = segment_point(p0, r, sigma);
  const double d0 = (p0 - s).norm();

  // Regress on the running supremum of the remaining samples rather than on
  // the raw distances: a transient rise followed by decay still has a
  // decaying envelope, while a distance that only grows does not.
  std::vector<double> envelope(path.size());
  double sup = 0.0;
  for (std::size_t j = path.size(); j-- > 0;) {
    sup = std::max(sup, (path[j].p - s).norm() / d0);
    envelope[j] = sup;
  }
  // Samples that sit exactly on s carry no slope information and are
  // dominated by any envelope.
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  std::size_t m = 0;
  for (std::size_t j = 0; j < path.size(); ++j) {
    const double ratio = envelope[j];
    if (!(ratio > 1e-300)) continue;
    const double t = path[j].t;
    const double y = std::log(ratio);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    ++m;
  }
  if (m < 2) return std::nullopt;
  const double md = static_cast<double>(m);
  const double var = stt - st * st / md;
  if (!(var > 0.0)) return std::nullopt;
  const double slope = (sty - st * sy / md) / var;
  const double intercept = (sy - slope * st) / md;
  const double lambda = -slope;
  if (!(lambda > options.min_decay) || !std::isfinite(lambda)) return std::nullopt;

  double c = std::max(1.0, std::exp(intercept));
  for (const auto& sample : path) {
    const double ratio = (sample.p - s).norm() / d0;
    c = std::max(c, ratio * std::exp(lambda * sample.t));
  }
  if (!std::isfinite(c)) return std::nullopt;
  return TrackingCertificate{c, lambda, sigma};
}

/// Grid search over sigma in {step, 2 step, ..., 1}; keeps the certificate
/// with the smallest sigma C exp(-lambda T). nullopt if no sigma admits a
/// decaying envelope.
inline std::optional<TrackingCertificate> fit_certificate(std::span<const PathSample> path,
                                                          const Vec2& p0, const Vec2& r,
                                                          const FitOptions& options = {}) {
  detail::check_fit_inputs(path, p0, r);
  if (!(options.sigma_step > 0.0 && options.sigma_step <= 1.0)) {
    throw ValidationError("sigma grid step must lie in (0, 1]");
  }
  const double horizon = options.horizon > 0.0 ? options.horizon : path.back().t;
  const auto steps = static_cast<std::size_t>(std::llround(std::ceil(1.0 / options.sigma_step - 1e-9)));

  std::optional<TrackingCertificate> best;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j <= steps; ++j) {
    const double sigma = std::min(1.0, static_cast<double>(j) * options.sigma_step);
    const auto cert = fit_certificate_at(path, p0, r, sigma, options);
    if (!cert) continue;
    const double score = cert->sigma * cert->beta(horizon);
    if (score < best_score) {
      best_score = score;
      best = cert;
    }
  }
  return best;
}

}  // namespace otaform
