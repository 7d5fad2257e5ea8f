#include "opiexit/exitstats.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "path_engine.hpp"

namespace opiexit::exitstats {

namespace {

using sde::detail::NullSink;
using sde::detail::StepPlan;

template <class Drift>
ExitOutcome lean_path(Drift&& f, const sde::SdeConfig& cfg,
                      const StepPlan& plan, std::uint64_t path, const Vec3& x0,
                      const Domain& d) {
  const auto exit = sde::detail::run_path(f, cfg.epsilon_noise, plan, cfg.seed,
                                          path, x0, &d, NullSink{});
  if (exit) return {exit->time, false};
  return {cfg.t_max, true};
}

// Shared ensemble driver: runs paths [0, n_paths) with the path-indexed
// stream contract, in contiguous chunks across threads. Results land in a
// preallocated per-path array, so the output is identical for any thread
// count.
template <class DriftFactory>
ExitEnsemble drive_ensemble(DriftFactory&& make_drift, const Vec3& x0,
                            const sde::SdeConfig& cfg, const Domain& d,
                            std::size_t n_paths, std::size_t n_threads) {
  sde::validate(cfg);
  if (n_paths < 1) throw ValidationError("ensemble needs n_paths >= 1");
  const StepPlan plan = StepPlan::make(cfg.dt, cfg.t_max);

  ExitEnsemble e;
  e.n_paths = n_paths;
  e.seed = cfg.seed;
  e.config = cfg;
  e.per_path.resize(n_paths);

  std::size_t t = n_threads == 0 ? std::thread::hardware_concurrency()
                                 : n_threads;
  t = std::max<std::size_t>(1, std::min(t, n_paths));

  std::exception_ptr first_error;
  std::mutex err_mutex;
  auto work = [&](std::size_t lo, std::size_t hi) {
    auto f = make_drift();
    try {
      for (std::size_t i = lo; i < hi; ++i)
        e.per_path[i] = lean_path(f, cfg, plan, i, x0, d);
    } catch (...) {
      std::lock_guard<std::mutex> g(err_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };

  if (t == 1) {
    work(0, n_paths);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(t);
    const std::size_t chunk = (n_paths + t - 1) / t;
    for (std::size_t k = 0; k < t; ++k) {
      const std::size_t lo = k * chunk;
      const std::size_t hi = std::min(n_paths, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(work, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  e.exit_times.reserve(n_paths);
  for (const auto& o : e.per_path) {
    if (o.censored)
      ++e.n_censored;
    else
      e.exit_times.push_back(o.time);
  }
  std::sort(e.exit_times.begin(), e.exit_times.end());
  return e;
}

}  // namespace

ExitOutcome first_exit(const PopulationState& x0, const EpidemicParams& p,
                       const sde::Policy* pol, const sde::ActuationMatrix& bt,
                       const sde::SdeConfig& cfg, const Domain& d) {
  sde::validate(cfg);
  model::validate(p);
  auto f = [&p, pol, &bt](const Vec3& x) {
    model::Vec3 drift = model::drift(model::to_state(x), p);
    if (pol) {
      const Eigen::Vector2d u = (*pol)(model::to_state(x));
      drift[0] += bt.b1 * u[0];
      drift[2] += bt.b2 * u[1];
    }
    return drift;
  };
  return lean_path(f, cfg, StepPlan::make(cfg.dt, cfg.t_max), 0, x0.vec(), d);
}

ExitOutcome first_exit(const Vec3& x0, const sde::AffineDynamics& dyn,
                       const sde::SdeConfig& cfg, const Domain& d) {
  sde::validate(cfg);
  auto f = [&dyn](const Vec3& x) -> Vec3 { return dyn.M * x + dyn.c; };
  return lean_path(f, cfg, StepPlan::make(cfg.dt, cfg.t_max), 0, x0, d);
}

ExitEnsemble run_ensemble(const PopulationState& x0, const EpidemicParams& p,
                          const sde::Policy* pol,
                          const sde::ActuationMatrix& bt,
                          const sde::SdeConfig& cfg, const Domain& d,
                          std::size_t n_paths, std::size_t n_threads) {
  model::validate(p);
  auto factory = [&p, pol, &bt]() {
    return [p, pol, bt](const Vec3& x) {
      model::Vec3 drift = model::drift(model::to_state(x), p);
      if (pol) {
        const Eigen::Vector2d u = (*pol)(model::to_state(x));
        drift[0] += bt.b1 * u[0];
        drift[2] += bt.b2 * u[1];
      }
      return drift;
    };
  };
  return drive_ensemble(factory, x0.vec(), cfg, d, n_paths, n_threads);
}

ExitEnsemble run_ensemble(const Vec3& x0, const sde::AffineDynamics& dyn,
                          const sde::SdeConfig& cfg, const Domain& d,
                          std::size_t n_paths, std::size_t n_threads) {
  auto factory = [&dyn]() {
    return [dyn](const Vec3& x) -> Vec3 { return dyn.M * x + dyn.c; };
  };
  return drive_ensemble(factory, x0, cfg, d, n_paths, n_threads);
}

std::vector<std::pair<double, double>> survival_curve(
    const ExitEnsemble& e, const std::vector<double>& t_grid) {
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]))
      throw ValidationError("survival grid must be strictly increasing");
  if (!t_grid.empty() &&
      (t_grid.front() < 0.0 || t_grid.back() > e.config.t_max))
    throw ValidationError("survival grid must lie within [0, t_max]");
  std::vector<std::pair<double, double>> curve;
  curve.reserve(t_grid.size());
  const double n = static_cast<double>(e.n_paths);
  for (const double t : t_grid) {
    const auto exited = std::upper_bound(e.exit_times.begin(),
                                         e.exit_times.end(), t) -
                        e.exit_times.begin();
    curve.emplace_back(t, 1.0 - static_cast<double>(exited) / n);
  }
  return curve;
}

std::vector<double> uniform_grid(double t0, double t1, std::size_t n) {
  if (n < 2 || !(t1 > t0))
    throw ValidationError("uniform_grid needs t1 > t0 and n >= 2 points");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

FitWindow default_fit_window(
    const std::vector<std::pair<double, double>>& curve, std::size_t n_paths) {
  const double p_tail =
      std::max(0.05, 2.0 / static_cast<double>(std::max<std::size_t>(
                               n_paths, 1)));
  double t_lo = std::numeric_limits<double>::quiet_NaN();
  double t_hi = std::numeric_limits<double>::quiet_NaN();
  double deepest = std::numeric_limits<double>::quiet_NaN();
  for (const auto& [t, p] : curve) {
    if (!(p > 0.0)) break;  // survival is non-increasing; nothing usable past 0
    if (std::isnan(t_lo) && p <= 0.8) t_lo = t;
    deepest = t;  // deepest usable point in case the tail probability is
                  // never reached (censoring)
    if (p <= p_tail) {
      t_hi = t;
      break;
    }
  }
  if (std::isnan(t_hi)) t_hi = deepest;
  if (std::isnan(t_lo) || std::isnan(t_hi) || !(t_hi > t_lo))
    throw ComputationError(
        "could not pick a fit window: too few exits before t_max; extend "
        "t_max or use more paths");
  return {t_lo, t_hi};
}

ExitRateEstimate estimate_exit_rate(
    const std::vector<std::pair<double, double>>& curve, const FitWindow& w) {
  if (!(w.t_hi > w.t_lo))
    throw ValidationError("exit-rate fit window must have t_hi > t_lo");
  std::vector<double> ts, ys;
  for (const auto& [t, p] : curve) {
    if (t < w.t_lo || t > w.t_hi) continue;
    if (!(p > 0.0))
      throw ValidationError(
          "exit-rate fit window contains zero survival; shorten the window "
          "or run more paths");
    ts.push_back(t);
    ys.push_back(-std::log(p));
  }
  const std::size_t n = ts.size();
  if (n < 5)
    throw ValidationError(
        "exit-rate fit needs at least 5 grid points inside the window");

  double tbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    tbar += ts[i];
    ybar += ys[i];
  }
  tbar /= static_cast<double>(n);
  ybar /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (ts[i] - tbar) * (ts[i] - tbar);
    sxy += (ts[i] - tbar) * (ys[i] - ybar);
  }
  const double slope = sxy / sxx;
  const double intercept = ybar - slope * tbar;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ys[i] - (intercept + slope * ts[i]);
    ssr += r * r;
  }
  const double se =
      n > 2 ? std::sqrt(ssr / (static_cast<double>(n - 2) * sxx)) : 0.0;

  ExitRateEstimate est;
  est.lambda_hat = slope;
  est.intercept = intercept;
  est.t_lo = w.t_lo;
  est.t_hi = w.t_hi;
  est.std_error = se;
  est.n_points = n;
  return est;
}

MeanExit mean_exit_time(const ExitEnsemble& e) {
  MeanExit m;
  m.n_exited = e.exit_times.size();
  m.censored_dominated =
      static_cast<double>(e.n_censored) >
      0.01 * static_cast<double>(e.n_paths);
  if (m.n_exited == 0) {
    // Nothing exited: report the horizon as a lower bound.
    m.mean = e.config.t_max;
    m.std_error = 0.0;
    m.censored_dominated = true;
    return m;
  }
  double s = 0.0;
  for (const double t : e.exit_times) s += t;
  m.mean = s / static_cast<double>(m.n_exited);
  double v = 0.0;
  for (const double t : e.exit_times) v += (t - m.mean) * (t - m.mean);
  if (m.n_exited > 1)
    m.std_error = std::sqrt(v / (static_cast<double>(m.n_exited - 1) *
                                 static_cast<double>(m.n_exited)));
  return m;
}

}  // namespace opiexit::exitstats
