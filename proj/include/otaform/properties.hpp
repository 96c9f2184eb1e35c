#pragma once

// Seeded property suites. Each draws random cases, checks one family of
// invariants and keeps the smallest violating case as the counterexample.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "otaform/agents.hpp"
#include "otaform/analysis.hpp"
#include "otaform/formation.hpp"
#include "otaform/integrator.hpp"
#include "otaform/rng.hpp"
#include "otaform/stochastic_matrix.hpp"
#include "otaform/topology_channel.hpp"

namespace otaform {

struct SuiteResult {
  std::string name;
  std::size_t trials = 0;
  std::size_t violations = 0;
  std::string counterexample;  // empty when there are no violations
  std::string summary;         // one-line description of what was measured

  bool passed() const { return violations == 0; }
};

/// Optional hook applied to every raw matrix a suite generates before it is
/// used. Lets tests inject corrupted data and watch the suite catch it.
using MatrixHook = std::function<void(Eigen::MatrixXd&)>;

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"tau1", "lemma1", "hull", "seminorm", "contraction", "tracking"};
  return names;
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// Dense or sparse random row-stochastic matrix (rows may have zeros).
inline Eigen::MatrixXd random_stochastic(std::size_t n, Rng& rng) {
  const auto k = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd m(k, k);
  const double sparsity = rng.uniform(0.0, 0.7);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) m(i, j) = rng.bernoulli(sparsity) ? 0.0 : rng.uniform01();
    if (m.row(i).sum() == 0.0) m(i, static_cast<Eigen::Index>(rng.index(n))) = 1.0;
    m.row(i) /= m.row(i).sum();
  }
  return m;
}

inline Eigen::VectorXd random_stacked(std::size_t n, Rng& rng, double scale = 10.0) {
  Eigen::VectorXd x(2 * static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.uniform(-scale, scale);
  return x;
}

inline std::string dump(const Eigen::MatrixXd& m) {
  std::ostringstream os;
  os.precision(17);
  os << m;
  return os.str();
}

namespace detail {

struct Tracker {
  SuiteResult result;
  std::size_t smallest = SIZE_MAX;

  void fail(std::size_t size, const std::string& what) {
    ++result.violations;
    if (size < smallest) {
      smallest = size;
      result.counterexample = what;
    }
  }
};

inline void apply(const MatrixHook& hook, Eigen::MatrixXd& m) {
  if (hook) hook(m);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

/// tau1 range, agreement of the two formulas, submultiplicativity.
inline SuiteResult suite_tau1(std::uint64_t seed, std::size_t trials, const MatrixHook& hook = {}) {
  detail::Tracker t;
  t.result.name = "tau1";
  Rng rng(derive_seed(seed, "suite.tau1"));
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::size_t n = 2 + rng.index(7);
    Eigen::MatrixXd a = random_stochastic(n, rng);
    Eigen::MatrixXd b = random_stochastic(n, rng);
    detail::apply(hook, a);
    detail::apply(hook, b);
    try {
      const RowStochasticMatrix ma(a), mb(b);
      const double ta = tau1(ma), tb = tau1(mb);
      const double tab = tau1(ma * mb);
      const double gap = std::abs(ta - tau1_overlap(ma));
      std::ostringstream why;
      if (ta < 0.0 || ta > 1.0) why << "tau1 = " << ta << " outside [0, 1]";
      else if (gap > 1e-10) why << "tau1 and overlap form differ by " << gap;
      else if (tab > ta * tb + 1e-12) why << "tau1(AB) = " << tab << " > tau1(A) tau1(B) = " << ta * tb;
      if (!why.str().empty()) t.fail(n, why.str() + "\nA =\n" + dump(a) + "\nB =\n" + dump(b));
    } catch (const ValidationError& e) {
      t.fail(n, std::string("invalid matrix: ") + e.what() + "\nA =\n" + dump(a) + "\nB =\n" + dump(b));
    }
  }
  t.result.trials = trials;
  t.result.summary = "tau1 in [0,1], |tau1 - overlap| <= 1e-10, tau1(AB) <= tau1(A) tau1(B)";
  return t.result;
}

/// Contraction of the sigma-modified window products over random realized
/// sequences and random sigma schedules.
inline SuiteResult suite_lemma1(std::uint64_t seed, std::size_t trials, const MatrixHook& hook = {}) {
  detail::Tracker t;
  t.result.name = "lemma1";
  Rng rng(derive_seed(seed, "suite.lemma1"));
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::size_t n = 3 + rng.index(6);       // 3..8
    const std::size_t window = 1 + rng.index(4);  // 1..4
    const std::size_t length = window + 1 + rng.index(6);
    TopologyParams params;
    params.edge_probability = rng.uniform(0.0, 0.6);
    params.xi_min = rng.uniform(0.05, 0.5);
    const auto channel = generate_topology_sequence(n, length, params, rng.index(UINT64_MAX));
    std::vector<RowStochasticMatrix> hs;
    for (const auto& real : channel) {
      Eigen::MatrixXd h = effective_matrix(real).matrix();
      detail::apply(hook, h);
      try {
        hs.emplace_back(h);
      } catch (const ValidationError& e) {
        t.fail(n, std::string("invalid matrix: ") + e.what() + "\nH =\n" + dump(h));
        break;
      }
    }
    if (hs.size() != length) continue;

    std::vector<std::vector<double>> sig(length, std::vector<double>(n));
    const double floor = rng.uniform(0.05, 1.0);
    for (auto& row : sig) {
      for (double& s : row) s = rng.uniform_closed(floor, 1.0);
    }
    const SigmaSchedule schedule(sig);
    const MixingCertificate cert = certify_mixing(hs, window);
    const double mu = std::max(0.0, cert.contraction_margin);
    const double bound = 1.0 - std::pow(schedule.sigma_min(), static_cast<double>(window)) * mu + 1e-10;

    std::vector<RowStochasticMatrix> modified;
    for (std::size_t k = 0; k < length; ++k) {
      modified.push_back(sigma_modify(hs[k], schedule.instant(k)));
      const Eigen::MatrixXd slack = modified.back().matrix() - schedule.sigma_min() * hs[k].matrix();
      if (slack.minCoeff() < -1e-15) {
        t.fail(n, "H^sigma < sigma_min H entrywise at k = " + std::to_string(k) + "\nH =\n" + dump(hs[k].matrix()));
      }
    }
    for (std::size_t k = 0; k + window <= length; ++k) {
      const double tv = tau1(window_product(modified, k, window));
      if (tv > bound) {
        std::ostringstream why;
        why << "tau1(window) = " << tv << " > 1 - sigma_min^L mu = " << bound << " (n = " << n << ", L = " << window
            << ", k = " << k << ", mu = " << mu << ", sigma_min = " << schedule.sigma_min() << ")";
        t.fail(n, why.str());
      }
    }
  }
  t.result.trials = trials;
  t.result.summary = "tau1(H^sigma window) <= 1 - sigma_min^L mu + 1e-10 and H^sigma >= sigma_min H";
  return t.result;
}

/// Normalized aggregates stay in the neighbors' hull; scaling one receiver's
/// gains leaves its row of H unchanged.
inline SuiteResult suite_hull(std::uint64_t seed, std::size_t trials) {
  detail::Tracker t;
  t.result.name = "hull";
  Rng rng(derive_seed(seed, "suite.hull"));
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::size_t n = 2 + rng.index(7);
    TopologyParams params;
    params.edge_probability = rng.uniform(0.0, 1.0);
    const auto real = generate_topology_sequence(n, 1, params, rng.index(UINT64_MAX)).front();
    std::vector<Vec2> payload(n);
    for (auto& p : payload) p = Vec2(rng.uniform(-100, 100), rng.uniform(-100, 100));
    const RowStochasticMatrix h = effective_matrix(real);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 agg = normalized_aggregate(real, i, payload);
      Vec2 lo = Vec2::Constant(INFINITY), hi = Vec2::Constant(-INFINITY);
      for (std::size_t j : real.graph().in_neighbors(i)) {
        lo = lo.cwiseMin(payload[j]);
        hi = hi.cwiseMax(payload[j]);
      }
      const double tol = 1e-12 * (1.0 + hi.cwiseAbs().maxCoeff());
      if ((agg.array() < lo.array() - tol).any() || (agg.array() > hi.array() + tol).any()) {
        std::ostringstream why;
        why.precision(17);
        why << "receiver " << i << " aggregate (" << agg.x() << ", " << agg.y() << ") outside hull\nxi =\n"
            << dump(real.coefficients());
        t.fail(n, why.str());
      }
      const double row_sum = h.matrix().row(static_cast<Eigen::Index>(i)).sum();
      if (std::abs(row_sum - 1.0) > 1e-12 || h.matrix().row(static_cast<Eigen::Index>(i)).minCoeff() < 0.0) {
        t.fail(n, "row " + std::to_string(i) + " of H is not stochastic\nxi =\n" + dump(real.coefficients()));
      }
      // Scale receiver i's gains by c; its normalized row must not move.
      const double c = rng.uniform(0.05, 1.0);
      Eigen::MatrixXd xi = real.coefficients();
      xi.row(static_cast<Eigen::Index>(i)) *= c;
      const ChannelRealization scaled(real.graph(), xi, real.instant());
      const double drift = (effective_matrix(scaled).matrix().row(static_cast<Eigen::Index>(i)) -
                            h.matrix().row(static_cast<Eigen::Index>(i)))
                               .cwiseAbs()
                               .maxCoeff();
      if (drift > 1e-12) t.fail(n, "row " + std::to_string(i) + " changed by " + std::to_string(drift) + " under gain scaling");
    }
  }
  t.result.trials = trials;
  t.result.summary = "aggregates inside neighbor hull, H rows stochastic, scale invariance";
  return t.result;
}

/// Seminorm axioms of Delta.
inline SuiteResult suite_seminorm(std::uint64_t seed, std::size_t trials) {
  detail::Tracker t;
  t.result.name = "seminorm";
  Rng rng(derive_seed(seed, "suite.seminorm"));
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::size_t n = 1 + rng.index(10);
    const Eigen::VectorXd x = random_stacked(n, rng), y = random_stacked(n, rng);
    const double alpha = rng.uniform(-5.0, 5.0);
    const double dx = delta_seminorm(x), dy = delta_seminorm(y);
    const double scale = 1e-12 * (1.0 + dx + dy);
    std::ostringstream why;
    if (dx < 0.0) why << "negative Delta";
    else if (std::abs(delta_seminorm(alpha * x) - std::abs(alpha) * dx) > scale * (1.0 + std::abs(alpha))) why << "homogeneity fails for alpha = " << alpha;
    else if (delta_seminorm(x + y) > dx + dy + scale) why << "triangle inequality fails";
    else {
      // Consensus vectors have zero disagreement.
      Eigen::VectorXd c(x.size());
      const Vec2 point(rng.uniform(-10, 10), rng.uniform(-10, 10));
      for (std::size_t i = 0; i < n; ++i) c.segment<2>(2 * static_cast<Eigen::Index>(i)) = point;
      if (delta_seminorm(c) != 0.0) why << "consensus vector has nonzero Delta";
      if (n > 1 && dx == 0.0) why << "distinct blocks with zero Delta";
    }
    if (!why.str().empty()) {
      std::ostringstream ce;
      ce.precision(17);
      ce << why.str() << "\nx = " << x.transpose() << "\ny = " << y.transpose();
      t.fail(n, ce.str());
    }
  }
  t.result.trials = trials;
  t.result.summary = "Delta >= 0, Delta(a x) = |a| Delta(x), triangle inequality, zero exactly at consensus";
  return t.result;
}

/// Delta((A kron I2) x) <= tau1(A) Delta(x).
inline SuiteResult suite_contraction(std::uint64_t seed, std::size_t trials, const MatrixHook& hook = {}) {
  detail::Tracker t;
  t.result.name = "contraction";
  Rng rng(derive_seed(seed, "suite.contraction"));
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::size_t n = 2 + rng.index(7);
    Eigen::MatrixXd a = random_stochastic(n, rng);
    detail::apply(hook, a);
    const Eigen::VectorXd x = random_stacked(n, rng);
    try {
      const RowStochasticMatrix ma(a);
      const double lhs = delta_seminorm(apply_kron_i2(ma.matrix(), x));
      const double rhs = tau1(ma) * delta_seminorm(x);
      if (lhs > rhs + 1e-12 * (1.0 + delta_seminorm(x))) {
        std::ostringstream why;
        why.precision(17);
        why << "Delta(Ax) = " << lhs << " > tau1(A) Delta(x) = " << rhs << "\nA =\n" << dump(a) << "\nx = " << x.transpose();
        t.fail(n, why.str());
      }
    } catch (const ValidationError& e) {
      t.fail(n, std::string("invalid matrix: ") + e.what() + "\nA =\n" + dump(a));
    }
  }
  t.result.trials = trials;
  t.result.summary = "Delta((A kron I2) x) <= tau1(A) Delta(x)";
  return t.result;
}

struct TrackingInstance {
  UnicycleState start;
  Vec2 reference;
  ControllerParams params;
};

/// Random (state, reference) pair with the reference-experiment gain law.
inline TrackingInstance random_tracking_instance(Rng& rng, double mu_rot = 0.0) {
  TrackingInstance inst;
  inst.start = {rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(0.0, 2.0 * std::numbers::pi)};
  inst.reference = Vec2(rng.uniform(-5, 5), rng.uniform(-5, 5));
  inst.params.gamma = -10.0 * std::log(rng.uniform(0.4, 1.0));
  inst.params.mu_rot = mu_rot;
  return inst;
}

/// Certificate fit over one interval of length `period` for a random instance.
inline std::optional<TrackingCertificate> certify_instance(const TrackingInstance& inst, double period,
                                                           std::vector<PathSample>* path_out = nullptr) {
  const AgentModel model = unicycle_agent(inst.params);
  auto result = integrate_interval(model, inst.start.to_vector(), inst.reference, 0.0, period, 1e-3, 20);
  auto cert = fit_certificate(result.path, inst.start.position(), inst.reference);
  if (cert && !certificate_holds(*cert, result.path, inst.start.position(), inst.reference)) cert.reset();
  if (path_out) *path_out = std::move(result.path);
  return cert;
}

/// At least 95 % of random unicycle intervals (mu_rot = 0, T = 0.1 s) admit a
/// certificate that dominates every sample.
inline SuiteResult suite_tracking(std::uint64_t seed, std::size_t trials, double required_rate = 0.95) {
  SuiteResult r;
  r.name = "tracking";
  Rng rng(derive_seed(seed, "suite.tracking"));
  std::size_t ok = 0;
  std::string first_failure;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const TrackingInstance inst = random_tracking_instance(rng);
    if (certify_instance(inst, 0.1)) {
      ++ok;
    } else if (first_failure.empty()) {
      std::ostringstream os;
      os.precision(17);
      os << "no certificate for start (" << inst.start.x << ", " << inst.start.y << ", " << inst.start.theta
         << "), reference (" << inst.reference.x() << ", " << inst.reference.y() << "), gamma " << inst.params.gamma;
      first_failure = os.str();
    }
  }
  r.trials = trials;
  const double rate = trials ? static_cast<double>(ok) / static_cast<double>(trials) : 1.0;
  std::ostringstream s;
  s << "certified " << ok << "/" << trials << " unicycle intervals (required rate " << required_rate << ")";
  r.summary = s.str();
  if (rate < required_rate) {
    r.violations = trials - ok;
    r.counterexample = first_failure;
  }
  return r;
}

/// Dispatch by name; nullopt for an unknown suite.
inline std::optional<SuiteResult> run_suite(const std::string& name, std::uint64_t seed, std::size_t trials,
                                            const MatrixHook& hook = {}) {
  if (name == "tau1") return suite_tau1(seed, trials, hook);
  if (name == "lemma1") return suite_lemma1(seed, trials, hook);
  if (name == "hull") return suite_hull(seed, trials);
  if (name == "seminorm") return suite_seminorm(seed, trials);
  if (name == "contraction") return suite_contraction(seed, trials, hook);
  if (name == "tracking") return suite_tracking(seed, trials);
  return std::nullopt;
}

}  // namespace otaform
