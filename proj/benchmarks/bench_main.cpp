// Microbenchmarks for the hot paths: RNG, stepping, ensembles, and the two
// linear-algebra workhorses. Run with --benchmark_filter=... to pick one.
#include <benchmark/benchmark.h>

#include "opiexit/control.hpp"
#include "opiexit/exitstats.hpp"
#include "opiexit/fdeigen.hpp"
#include "opiexit/model.hpp"
#include "opiexit/quasipotential.hpp"
#include "opiexit/sde.hpp"

using namespace opiexit;
using model::Mat3;
using model::Vec3;

namespace {

sde::AffineDynamics contraction() {
  sde::AffineDynamics dyn;
  dyn.M = Mat3::Zero();
  dyn.M(0, 0) = -1.0;
  return dyn;
}

void BM_normal_draw(benchmark::State& state) {
  auto stream = sde::gaussian_stream(42, 0);
  for (auto _ : state) benchmark::DoNotOptimize(stream.next());
}
BENCHMARK(BM_normal_draw);

void BM_em_step(benchmark::State& state) {
  const auto p = model::default_params();
  const sde::ActuationMatrix bt;
  model::PopulationState s{0.1185, 0.5015, 0.16};
  for (auto _ : state) {
    s = sde::em_step(s, p, nullptr, bt, 0.01, 1e-2, 1e-3);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_em_step);

void BM_simulate_path(benchmark::State& state) {
  sde::SdeConfig cfg;
  cfg.epsilon_noise = 0.5;
  cfg.dt = 1e-3;
  cfg.t_max = 5.0;
  cfg.seed = 7;
  const auto d = exitstats::Domain::box({-1, -2, -2}, {1, 2, 2});
  for (auto _ : state) {
    auto r = sde::simulate_path(Vec3::Zero(), contraction(), cfg, &d);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_simulate_path);

void BM_run_ensemble(benchmark::State& state) {
  sde::SdeConfig cfg;
  cfg.epsilon_noise = 0.5;
  cfg.dt = 1e-3;
  cfg.t_max = 40.0;
  cfg.seed = 7;
  const auto d = exitstats::Domain::box({-1, -2, -2}, {1, 2, 2});
  for (auto _ : state) {
    auto ens = exitstats::run_ensemble(Vec3::Zero(), contraction(), cfg, d,
                                       std::size_t(state.range(0)), 1);
    benchmark::DoNotOptimize(ens);
  }
}
BENCHMARK(BM_run_ensemble)->Arg(100)->Arg(1000);

void BM_estimate_exit_rate(benchmark::State& state) {
  sde::SdeConfig cfg;
  cfg.epsilon_noise = 0.5;
  cfg.dt = 1e-3;
  cfg.t_max = 40.0;
  cfg.seed = 7;
  const auto d = exitstats::Domain::box({-1, -2, -2}, {1, 2, 2});
  const auto ens =
      exitstats::run_ensemble(Vec3::Zero(), contraction(), cfg, d, 2000, 1);
  const auto grid = exitstats::uniform_grid(0.0, 40.0, 512);
  for (auto _ : state) {
    const auto curve = exitstats::survival_curve(ens, grid);
    auto est = exitstats::estimate_exit_rate(
        curve, exitstats::default_fit_window(curve, ens.n_paths));
    benchmark::DoNotOptimize(est);
  }
}
BENCHMARK(BM_estimate_exit_rate);

void BM_solve_care(benchmark::State& state) {
  const auto lin =
      model::linearize_addiction_free(model::addiction_free_params());
  const sde::ActuationMatrix bt{0.01, 0.001};
  for (auto _ : state) {
    auto sol = control::solve_care(lin.A, bt, 0.001);
    benchmark::DoNotOptimize(sol);
  }
}
BENCHMARK(BM_solve_care);

void BM_quasipotential_simplex(benchmark::State& state) {
  Mat3 P;
  P << 2.0, 0.3, 0.1, 0.3, 1.5, 0.2, 0.1, 0.2, 1.0;
  const auto d = exitstats::Domain::simplex(0, 0, 0, 0);
  const Vec3 center(0.2, 0.3, 0.35);
  for (auto _ : state) {
    auto r = quasipot::quasipotential(P, d, center);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_quasipotential_simplex);

void BM_discretize_17(benchmark::State& state) {
  const auto lin =
      model::linearize_addiction_free(model::addiction_free_params());
  fdeigen::GridSpec g;
  g.lo = Vec3(-0.05, -0.05, -0.05);
  g.hi = Vec3(0.05, 0.05, 0.05);
  g.n = {17, 17, 17};
  for (auto _ : state) {
    auto op = fdeigen::discretize_generator(fdeigen::linear_drift(lin.A),
                                            0.01, g);
    benchmark::DoNotOptimize(op);
  }
}
BENCHMARK(BM_discretize_17);

void BM_principal_eigenvalue_17(benchmark::State& state) {
  const auto lin =
      model::linearize_addiction_free(model::addiction_free_params());
  fdeigen::GridSpec g;
  g.lo = Vec3(-0.05, -0.05, -0.05);
  g.hi = Vec3(0.05, 0.05, 0.05);
  g.n = {17, 17, 17};
  const auto op =
      fdeigen::discretize_generator(fdeigen::linear_drift(lin.A), 0.01, g);
  for (auto _ : state) {
    auto sol = fdeigen::principal_eigenvalue(op);
    benchmark::DoNotOptimize(sol);
  }
}
BENCHMARK(BM_principal_eigenvalue_17);

}  // namespace

BENCHMARK_MAIN();
