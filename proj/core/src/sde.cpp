#include "opiexit/sde.hpp"

#include <cmath>

#include "path_engine.hpp"

namespace opiexit::sde {

void validate(const SdeConfig& cfg) {
  if (!(cfg.epsilon_noise >= 0.0) || !std::isfinite(cfg.epsilon_noise))
    throw ValidationError("sde parameter 'epsilon_noise' must be >= 0");
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt))
    throw ValidationError("sde parameter 'dt' must be > 0");
  if (!(cfg.t_max >= cfg.dt) || !std::isfinite(cfg.t_max))
    throw ValidationError("sde parameter 't_max' must be >= dt");
}

namespace {

// Drift plus actuation, shared by em_step and the path engines so single
// steps and full paths agree bit for bit.
inline model::Vec3 controlled_drift(const PopulationState& s,
                                    const EpidemicParams& p, const Policy* pol,
                                    const ActuationMatrix& bt) {
  model::Vec3 d = model::drift(s, p);
  if (pol) {
    const Eigen::Vector2d u = (*pol)(s);
    d[0] += bt.b1 * u[0];
    d[2] += bt.b2 * u[1];
  }
  return d;
}

}  // namespace

PopulationState em_step(const PopulationState& s, const EpidemicParams& p,
                        const Policy* pol, const ActuationMatrix& bt,
                        double eps_noise, double dt, double dW) {
  const model::Vec3 d = controlled_drift(s, p, pol, bt);
  const double sqrt_eps = std::sqrt(eps_noise);
  return {s.x1 + d[0] * dt + sqrt_eps * dW, s.x2 + d[1] * dt,
          s.x3 + d[2] * dt};
}

PathResult simulate_path(const PopulationState& x0, const EpidemicParams& p,
                         const Policy* pol, const ActuationMatrix& bt,
                         const SdeConfig& cfg, const exitstats::Domain* stop) {
  validate(cfg);
  const auto plan = detail::StepPlan::make(cfg.dt, cfg.t_max);
  PathResult out;
  out.trajectory.t.reserve(plan.total() + 1);
  out.trajectory.x.reserve(plan.total() + 1);
  auto record = [&out](double t, const model::Vec3& x) {
    out.trajectory.t.push_back(t);
    out.trajectory.x.push_back(model::to_state(x));
  };
  auto f = [&p, pol, &bt](const model::Vec3& x) {
    return controlled_drift(model::to_state(x), p, pol, bt);
  };
  const auto exit = detail::run_path(f, cfg.epsilon_noise, plan, cfg.seed,
                                     /*path=*/0, x0.vec(), stop, record);
  if (exit) out.exit = ExitRecord{exit->time, model::to_state(exit->state)};
  return out;
}

PathResult simulate_path(const Vec3& x0, const AffineDynamics& dyn,
                         const SdeConfig& cfg, const exitstats::Domain* stop) {
  validate(cfg);
  const auto plan = detail::StepPlan::make(cfg.dt, cfg.t_max);
  PathResult out;
  out.trajectory.t.reserve(plan.total() + 1);
  out.trajectory.x.reserve(plan.total() + 1);
  auto record = [&out](double t, const model::Vec3& x) {
    out.trajectory.t.push_back(t);
    out.trajectory.x.push_back(model::to_state(x));
  };
  auto f = [&dyn](const model::Vec3& x) -> model::Vec3 {
    return dyn.M * x + dyn.c;
  };
  const auto exit = detail::run_path(f, cfg.epsilon_noise, plan, cfg.seed,
                                     /*path=*/0, x0, stop, record);
  if (exit) out.exit = ExitRecord{exit->time, model::to_state(exit->state)};
  return out;
}

}  // namespace opiexit::sde
