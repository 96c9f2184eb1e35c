#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "otaform/agents.hpp"
#include "otaform/error.hpp"

namespace otaform {

struct IntervalResult {
  StateVector end_state;
  std::vector<PathSample> path;  // t relative to the interval start
};

/// Classical RK4 step of the closed loop with the reference held fixed.
inline StateVector rk4_step(const AgentModel& model, double t, const StateVector& x, const Vec2& r, double h) {
  const StateVector k1 = model.closed_loop(t, x, r);
  const StateVector k2 = model.closed_loop(t + 0.5 * h, x + 0.5 * h * k1, r);
  const StateVector k3 = model.closed_loop(t + 0.5 * h, x + 0.5 * h * k2, r);
  const StateVector k4 = model.closed_loop(t + h, x + h * k3, r);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Integrates one flow interval of length `duration` with a fixed step no
/// larger than `step` (the step is shrunk so it divides the interval evenly).
/// Records `samples + 1` evenly spaced path points, both endpoints included.
/// `instant` and `agent` only label the error raised on a non-finite state.
inline IntervalResult integrate_interval(const AgentModel& model, const StateVector& x0, const Vec2& reference,
                                         double t0, double duration, double step, std::size_t samples,
                                         std::size_t instant = 0, std::size_t agent = 0) {
  if (!(duration > 0.0) || !(step > 0.0)) throw ValidationError("integrate_interval: need duration, step > 0");
  if (samples < 1) throw ValidationError("integrate_interval: need at least one sample");
  if (static_cast<std::size_t>(x0.size()) != model.state_dim) {
    throw ValidationError("integrate_interval: state has wrong dimension for " + model.kind);
  }
  const auto n_steps = static_cast<std::size_t>(std::max(1.0, std::ceil(duration / step - 1e-9)));
  const double h = duration / static_cast<double>(n_steps);

  std::vector<std::size_t> sample_at(samples + 1);
  for (std::size_t j = 0; j <= samples; ++j) {
    sample_at[j] = static_cast<std::size_t>(std::llround(static_cast<double>(j * n_steps) / static_cast<double>(samples)));
  }

  IntervalResult out;
  out.path.reserve(samples + 1);
  StateVector x = x0;
  std::size_t next = 0;
  for (std::size_t s = 0;; ++s) {
    while (next <= samples && sample_at[next] == s) {
      out.path.push_back({static_cast<double>(s) * h, model.output(t0 + static_cast<double>(s) * h, x)});
      ++next;
    }
    if (s == n_steps) break;
    x = rk4_step(model, t0 + static_cast<double>(s) * h, x, reference, h);
    if (!x.allFinite()) {
      throw IntegrationError(instant, agent, "non-finite state after step " + std::to_string(s + 1));
    }
  }
  out.end_state = std::move(x);
  return out;
}

}  // namespace otaform
