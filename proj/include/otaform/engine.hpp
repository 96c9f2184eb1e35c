#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "otaform/agents.hpp"
#include "otaform/analysis.hpp"
#include "otaform/formation.hpp"
#include "otaform/integrator.hpp"
#include "otaform/rng.hpp"
#include "otaform/scenario.hpp"
#include "otaform/stochastic_matrix.hpp"
#include "otaform/topology_channel.hpp"

namespace otaform {

/// State of the swarm at one communication instant t_k. `refs` are the
/// references after the jump (held over the following interval); the final
/// instant has no jump, so its refs are the ones still held and `h` is empty.
struct InstantRecord {
  std::size_t k = 0;
  double t = 0.0;
  double mse = 0.0;
  double delta = 0.0;
  std::vector<Vec2> positions;
  std::vector<Vec2> refs;
  std::optional<RowStochasticMatrix> h;
  TransmissionLedger ledger;
};

struct SimTrace {
  std::size_t n = 0;
  FormationSpec formation;
  std::vector<InstantRecord> records;
  /// paths[k][i] samples agent i over (t_k, t_{k+1}], for k < updates().
  std::vector<std::vector<std::vector<PathSample>>> paths;

  std::size_t updates() const { return paths.size(); }

  std::vector<double> times() const {
    std::vector<double> out;
    for (const auto& r : records) out.push_back(r.t);
    return out;
  }
  std::vector<double> mse() const {
    std::vector<double> out;
    for (const auto& r : records) out.push_back(r.mse);
    return out;
  }
  std::vector<RowStochasticMatrix> matrices() const {
    std::vector<RowStochasticMatrix> out;
    for (const auto& r : records) {
      if (r.h) out.push_back(*r.h);
    }
    return out;
  }
  /// Smallest spacing between consecutive instants.
  double min_gap() const {
    double g = INFINITY;
    for (std::size_t k = 1; k < records.size(); ++k) g = std::min(g, records[k].t - records[k - 1].t);
    return g;
  }
};

struct SwarmInit {
  std::vector<AgentModel> models;
  std::vector<StateVector> states;
  std::vector<double> gammas;
};

/// Agent models and initial states, all drawn from the "init" stream: first
/// every gain, then every position, then every heading.
inline SwarmInit initialize_swarm(const ScenarioConfig& config) {
  Rng rng(derive_seed(config.seed, "init"));
  const std::size_t n = config.n;
  SwarmInit out;
  out.gammas.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& law = config.agent(i).gamma;
    out.gammas[i] = law.kind == GammaLawKind::Fixed ? law.value
                                                    : -law.scale * std::log(rng.uniform(law.a_min, law.a_max));
    // a = 1 would give gamma = 0; the open upper end of uniform() excludes it.
  }
  const FormationSpec spec = config.formation_spec();
  std::vector<Vec2> positions(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 drawn{rng.uniform(config.init.position_min, config.init.position_max),
                     rng.uniform(config.init.position_min, config.init.position_max)};
    positions[i] = config.init.mode == InitMode::InFormation ? Vec2(config.init.center + spec.displacements[i]) : drawn;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double heading = rng.uniform(config.init.heading_min, config.init.heading_max);
    const AgentConfig& a = config.agent(i);
    if (a.kind == AgentKind::Unicycle) {
      out.models.push_back(unicycle_agent(controller_params(a, out.gammas[i])));
      out.states.push_back(UnicycleState{positions[i].x(), positions[i].y(), heading}.to_vector());
    } else {
      out.models.push_back(first_order_agent(a.lambda));
      out.states.push_back(StateVector{{positions[i].x(), positions[i].y()}});
    }
  }
  return out;
}

/// Runs the jump-flow loop: at each t_k < t_last the agents exchange shifted
/// positions over the channel and reset their references; in between each
/// agent tracks its held reference. Single-threaded and bit-reproducible.
inline SimTrace run_scenario(const ScenarioConfig& config) {
  config.validate();
  const std::vector<double> times = schedule_instants(config);
  const std::size_t n = config.n;
  const std::size_t updates = times.size() - 1;
  const FormationSpec spec = config.formation_spec();

  const std::vector<ChannelRealization> channel =
      updates > 0 ? generate_topology_sequence(n, updates, config.topology, config.seed)
                  : std::vector<ChannelRealization>{};
  SwarmInit swarm = initialize_swarm(config);

  SimTrace trace;
  trace.n = n;
  trace.formation = spec;
  trace.records.reserve(times.size());
  trace.paths.reserve(updates);

  TransmissionLedger ledger;
  std::vector<Vec2> refs;
  for (std::size_t i = 0; i < n; ++i) refs.push_back(swarm.models[i].output(0.0, swarm.states[i]));

  for (std::size_t k = 0; k < times.size(); ++k) {
    InstantRecord rec;
    rec.k = k;
    rec.t = times[k];
    for (std::size_t i = 0; i < n; ++i) rec.positions.push_back(swarm.models[i].output(times[k], swarm.states[i]));
    const Eigen::VectorXd shifted = shifted_state(rec.positions, spec);
    rec.mse = stacked_mse(shifted);
    rec.delta = delta_seminorm(shifted);

    if (k < updates) {
      const ChannelRealization& real = channel[k];
      refs = jump_update(rec.positions, spec, real).refs;
      rec.h = effective_matrix(real);
      ledger = record_instant(ledger, real, 2);

      const double duration = times[k + 1] - times[k];
      std::vector<std::vector<PathSample>> interval_paths(n);
      for (std::size_t i = 0; i < n; ++i) {
        auto result = integrate_interval(swarm.models[i], swarm.states[i], refs[i], times[k], duration,
                                         config.step, config.samples_per_interval, k, i);
        swarm.states[i] = std::move(result.end_state);
        interval_paths[i] = std::move(result.path);
      }
      trace.paths.push_back(std::move(interval_paths));
    }
    rec.refs = refs;
    rec.ledger = ledger;
    trace.records.push_back(std::move(rec));
  }
  return trace;
}

}  // namespace otaform
