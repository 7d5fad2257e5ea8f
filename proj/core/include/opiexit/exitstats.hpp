#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "opiexit/domain.hpp"
#include "opiexit/sde.hpp"

namespace opiexit::exitstats {

using model::EpidemicParams;
using model::PopulationState;
using model::Vec3;

// Outcome of one path: exit time in (0, t_max], or censored (still inside at
// the horizon).
struct ExitOutcome {
  double time;
  bool censored;
};

struct ExitEnsemble {
  std::size_t n_paths = 0;
  std::vector<double> exit_times;  // sorted ascending, exited paths only
  std::size_t n_censored = 0;
  std::uint64_t seed = 0;
  sde::SdeConfig config;
  std::vector<ExitOutcome> per_path;  // indexed by path, unsorted
};

struct ExitRateEstimate {
  double lambda_hat = 0.0;
  double intercept = 0.0;
  double t_lo = 0.0, t_hi = 0.0;
  double std_error = 0.0;
  std::size_t n_points = 0;
};

struct FitWindow {
  double t_lo, t_hi;
};

struct MeanExit {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_exited = 0;
  // Set when more than 1% of paths were censored: the mean over exited paths
  // is then biased low and should be read as a lower bound.
  bool censored_dominated = false;
};

// Requires d.contains(x0). Exit time is the timestamp of the first sample
// outside d (no sub-step crossing correction).
ExitOutcome first_exit(const PopulationState& x0, const EpidemicParams& p,
                       const sde::Policy* pol, const sde::ActuationMatrix& bt,
                       const sde::SdeConfig& cfg, const Domain& d);
ExitOutcome first_exit(const Vec3& x0, const sde::AffineDynamics& dyn,
                       const sde::SdeConfig& cfg, const Domain& d);

// Path i uses the counter-based stream (cfg.seed, i); results are identical
// for any n_threads (0 = hardware concurrency).
ExitEnsemble run_ensemble(const PopulationState& x0, const EpidemicParams& p,
                          const sde::Policy* pol,
                          const sde::ActuationMatrix& bt,
                          const sde::SdeConfig& cfg, const Domain& d,
                          std::size_t n_paths, std::size_t n_threads = 0);
ExitEnsemble run_ensemble(const Vec3& x0, const sde::AffineDynamics& dyn,
                          const sde::SdeConfig& cfg, const Domain& d,
                          std::size_t n_paths, std::size_t n_threads = 0);

// Empirical survival P(tau > t) on t_grid; censored paths count as alive
// through t_max.
std::vector<std::pair<double, double>> survival_curve(
    const ExitEnsemble& e, const std::vector<double>& t_grid);

std::vector<double> uniform_grid(double t0, double t1, std::size_t n);

// [t at P=0.8, t at P=max(0.05, 2/n_paths)]: skips the non-exponential
// transient and the noisy tail.
FitWindow default_fit_window(const std::vector<std::pair<double, double>>& curve,
                             std::size_t n_paths);

// Least-squares slope of -log P(tau > t) over the window. Requires >= 5 grid
// points with strictly positive survival in the window.
ExitRateEstimate estimate_exit_rate(
    const std::vector<std::pair<double, double>>& curve, const FitWindow& w);

MeanExit mean_exit_time(const ExitEnsemble& e);

}  // namespace opiexit::exitstats
