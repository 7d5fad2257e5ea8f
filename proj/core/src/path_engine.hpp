#pragma once

// Internal stepping engine shared by simulate_path and the ensemble runner.
// Not installed.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "opiexit/domain.hpp"
#include "opiexit/model.hpp"
#include "opiexit/rng.hpp"

namespace opiexit::sde::detail {

// Step schedule: n_full steps of size dt plus an optional shorter tail step
// landing exactly on t_max.
struct StepPlan {
  double dt = 0.0;
  double t_max = 0.0;
  std::uint64_t n_full = 0;
  double tail = 0.0;

  static StepPlan make(double dt, double t_max) {
    StepPlan p;
    p.dt = dt;
    p.t_max = t_max;
    const double q = t_max / dt;
    p.n_full = static_cast<std::uint64_t>(q + 1e-9 * (q + 1.0));
    const double rem = t_max - static_cast<double>(p.n_full) * dt;
    p.tail = rem > 1e-12 * t_max ? rem : 0.0;
    return p;
  }

  std::uint64_t total() const { return n_full + (tail > 0.0 ? 1 : 0); }
  double step_size(std::uint64_t s) const { return s < n_full ? dt : tail; }
  // Timestamp after step s (0-based). The final sample lands exactly on
  // t_max by construction.
  double time_after(std::uint64_t s) const {
    return s + 1 < total() ? static_cast<double>(s + 1) * dt : t_max;
  }
};

struct Exit3 {
  double time;
  model::Vec3 state;
};

// Euler-Maruyama with noise on x1 only. `f` maps Vec3 -> Vec3 (the full
// drift, actuation already folded in); `sink(t, x)` observes every sample
// including the initial one. The state at t = 0 is never tested against
// `stop`: an exit is the first post-step sample outside the closed domain.
template <class Drift, class Sink>
std::optional<Exit3> run_path(Drift&& f, double eps_noise, const StepPlan& plan,
                              std::uint64_t seed, std::uint64_t path,
                              model::Vec3 x, const exitstats::Domain* stop,
                              Sink&& sink) {
  const double sqrt_eps = std::sqrt(eps_noise);
  NormalStream g(seed, path);
  sink(0.0, x);
  const std::uint64_t n = plan.total();
  for (std::uint64_t s = 0; s < n; ++s) {
    const double h = plan.step_size(s);
    const double dW = std::sqrt(h) * g.next();
    const model::Vec3 d = f(x);
    x[0] += d[0] * h + sqrt_eps * dW;
    x[1] += d[1] * h;
    x[2] += d[2] * h;
    if (!(std::isfinite(x[0]) && std::isfinite(x[1]) && std::isfinite(x[2])))
      throw ComputationError(
          "simulation produced a non-finite state at step " +
          std::to_string(s + 1) + " (t = " +
          std::to_string(plan.time_after(s)) + ")");
    const double t = plan.time_after(s);
    sink(t, x);
    if (stop && !stop->contains(x[0], x[1], x[2])) return Exit3{t, x};
  }
  return std::nullopt;
}

struct NullSink {
  void operator()(double, const model::Vec3&) const {}
};

}  // namespace opiexit::sde::detail
