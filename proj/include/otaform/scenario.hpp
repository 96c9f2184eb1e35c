#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "otaform/agents.hpp"
#include "otaform/error.hpp"
#include "otaform/formation.hpp"
#include "otaform/rng.hpp"
#include "otaform/topology_channel.hpp"

namespace otaform {

enum class ScheduleMode { Fixed, Random };
enum class AgentKind { Unicycle, FirstOrder };
enum class GammaLawKind { Fixed, NegLogUniform };
enum class InitMode { Random, InFormation };
enum class FormationKind { Polygon, Explicit };

/// gamma = value, or gamma = -scale ln a with a ~ U(a_min, a_max).
struct GammaLaw {
  GammaLawKind kind = GammaLawKind::NegLogUniform;
  double value = 1.0;
  double a_min = 0.4;
  double a_max = 1.0;
  double scale = 10.0;
};

struct AgentConfig {
  AgentKind kind = AgentKind::Unicycle;
  ControllerVariant variant = ControllerVariant::Perpendicular;
  double kappa_eps = 0.9;
  double deadband = 1e-6;
  double mu_rot = 0.0;
  GammaLaw gamma;
  double lambda = 1.0;  // first-order agents only
};

/// Per-agent replacement of the shared agent block.
struct AgentOverride {
  std::size_t index = 0;
  AgentConfig agent;
};

struct FormationConfig {
  FormationKind kind = FormationKind::Polygon;
  double radius = 5.0;
  std::vector<Vec2> displacements;  // explicit kind only
};

struct InitConfig {
  InitMode mode = InitMode::Random;
  double position_min = -5.0;
  double position_max = 5.0;
  double heading_min = 0.0;
  double heading_max = 2.0 * std::numbers::pi;
  Vec2 center = Vec2::Zero();  // in_formation only
};

struct AnalysisConfig {
  double sigma_step = 0.05;
  std::size_t mixing_window = 0;  // 0 selects n - 1
  double verdict_ratio = 1e-3;
};

/// Complete, seeded description of one experiment.
struct ScenarioConfig {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  std::size_t n = 6;
  double horizon = 30.0;  // s
  ScheduleMode schedule = ScheduleMode::Fixed;
  double t_min = 0.1;  // s
  double t_max = 0.1;  // s
  double step = 1e-3;  // s
  std::size_t samples_per_interval = 20;
  AgentConfig agents;
  std::vector<AgentOverride> overrides;
  FormationConfig formation;
  TopologyParams topology;
  InitConfig init;
  AnalysisConfig analysis;

  const AgentConfig& agent(std::size_t i) const {
    for (const auto& o : overrides) {
      if (o.index == i) return o.agent;
    }
    return agents;
  }

  void validate() const {
    if (n < 2) throw ConfigError("n", "need at least 2 agents");
    if (!(horizon > 0.0)) throw ConfigError("horizon", "must be > 0");
    if (!(t_min > 0.0)) throw ConfigError("schedule.t_min", "must be > 0");
    if (!(t_min <= t_max)) throw ConfigError("schedule.t_max", "t_min must not exceed t_max");
    if (schedule == ScheduleMode::Fixed && t_min != t_max) {
      throw ConfigError("schedule.mode", "fixed mode needs t_min == t_max");
    }
    if (!(step > 0.0) || step > t_min / 10.0 * (1.0 + 1e-12)) {
      throw ConfigError("integrator.step", "must lie in (0, t_min / 10]");
    }
    if (samples_per_interval < 2) throw ConfigError("integrator.samples_per_interval", "must be >= 2");
    check_agent(agents, "agents");
    for (const auto& o : overrides) {
      if (o.index >= n) throw ConfigError("agents.overrides.index", "agent index out of range");
      check_agent(o.agent, "agents.overrides");
    }
    if (formation.kind == FormationKind::Explicit && formation.displacements.size() != n) {
      throw ConfigError("formation.displacements", "need exactly one displacement per agent");
    }
    if (formation.kind == FormationKind::Polygon && !std::isfinite(formation.radius)) {
      throw ConfigError("formation.radius", "must be finite");
    }
    topology.validate();
    if (!(init.position_min <= init.position_max)) throw ConfigError("init.position_max", "below position_min");
    if (!(init.heading_min <= init.heading_max)) throw ConfigError("init.heading_max", "below heading_min");
    if (!(analysis.sigma_step > 0.0 && analysis.sigma_step <= 1.0)) {
      throw ConfigError("analysis.sigma_step", "must lie in (0, 1]");
    }
    if (!(analysis.verdict_ratio > 0.0 && analysis.verdict_ratio < 1.0)) {
      throw ConfigError("analysis.verdict_ratio", "must lie in (0, 1)");
    }
  }

  FormationSpec formation_spec() const {
    if (formation.kind == FormationKind::Polygon) return FormationSpec::regular_polygon(n, formation.radius);
    return FormationSpec{formation.displacements};
  }

  std::size_t mixing_window() const {
    return analysis.mixing_window > 0 ? analysis.mixing_window : default_mixing_window(n);
  }

 private:
  static void check_agent(const AgentConfig& a, const std::string& where) {
    if (a.kind == AgentKind::Unicycle) {
      if (!(a.kappa_eps > 0.0 && a.kappa_eps < 1.0)) throw ConfigError(where + ".kappa_eps", "must lie in (0, 1)");
      if (!(a.deadband > 0.0)) throw ConfigError(where + ".deadband", "must be > 0");
      if (!std::isfinite(a.mu_rot)) throw ConfigError(where + ".mu_rot", "must be finite");
    }
    if (a.kind == AgentKind::FirstOrder && !(a.lambda > 0.0)) throw ConfigError(where + ".lambda", "must be > 0");
    const auto& g = a.gamma;
    if (g.kind == GammaLawKind::Fixed && !(g.value > 0.0)) throw ConfigError(where + ".gamma.value", "must be > 0");
    if (g.kind == GammaLawKind::NegLogUniform) {
      if (!(g.a_min > 0.0 && g.a_min < g.a_max && g.a_max <= 1.0)) {
        throw ConfigError(where + ".gamma.a_min", "need 0 < a_min < a_max <= 1");
      }
      if (!(g.scale > 0.0)) throw ConfigError(where + ".gamma.scale", "must be > 0");
    }
  }
};

/// Communication instants t_0 = 0 < t_1 < ... within the horizon. Fixed mode
/// uses t_k = k T; random mode draws each gap uniformly in [t_min, t_max]
/// from the "schedule" stream. A horizon shorter than t_min yields {0}.
inline std::vector<double> schedule_instants(const ScenarioConfig& config) {
  config.validate();
  std::vector<double> times{0.0};
  if (config.schedule == ScheduleMode::Fixed) {
    const auto intervals = static_cast<std::size_t>(std::floor(config.horizon / config.t_min + 1e-9));
    for (std::size_t k = 1; k <= intervals; ++k) times.push_back(static_cast<double>(k) * config.t_min);
    return times;
  }
  Rng rng(derive_seed(config.seed, "schedule"));
  for (;;) {
    const double next = times.back() + rng.uniform_closed(config.t_min, config.t_max);
    if (next > config.horizon + 1e-9) break;
    times.push_back(next);
  }
  return times;
}

/// The tracking controller parameters for agent i with its sampled gain.
inline ControllerParams controller_params(const AgentConfig& a, double gamma) {
  ControllerParams p;
  p.gamma = gamma;
  p.mu_rot = a.mu_rot;
  p.kappa_eps = a.kappa_eps;
  p.deadband = a.deadband;
  p.variant = a.variant;
  return p;
}

// ---------------------------------------------------------------------------
// The three reference experiments: six unicycles, hexagon of radius 5,
// 30 s horizon, gamma_i = -10 ln a_i with a_i ~ U(0.4, 1).
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kPaperSeed = 2;

inline ScenarioConfig paper_run(int run, std::uint64_t seed = kPaperSeed) {
  ScenarioConfig c;
  c.seed = seed;
  c.n = 6;
  c.horizon = 30.0;
  c.formation.kind = FormationKind::Polygon;
  c.formation.radius = 5.0;
  const double period = run == 3 ? 1.0 : 0.1;
  c.t_min = c.t_max = period;
  c.agents.mu_rot = run == 1 ? 0.0 : std::numbers::pi / (2.0 * period);
  switch (run) {
    case 1: c.name = "run1"; break;
    case 2: c.name = "run2"; break;
    case 3: c.name = "run3"; break;
    default: throw ConfigError("run", "reference runs are 1, 2 and 3");
  }
  return c;
}

}  // namespace otaform
