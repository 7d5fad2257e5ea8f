#include "opiexit/commands.hpp"

#include <filesystem>
#include <optional>

#include "opiexit/control.hpp"
#include "opiexit/csv.hpp"
#include "opiexit/exitstats.hpp"
#include "opiexit/fdeigen.hpp"
#include "opiexit/quasipotential.hpp"

namespace opiexit::cli {

namespace fs = std::filesystem;

namespace {

fs::path prepare_out(const std::string& out_dir) {
  fs::path p(out_dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec)
    throw ComputationError("cannot create output directory '" + out_dir +
                           "': " + ec.message());
  return p;
}

void write_matrix3(const fs::path& path, const model::Mat3& m) {
  CsvTable t;
  t.header = {"row", "c1", "c2", "c3"};
  for (int r = 0; r < 3; ++r)
    t.rows.push_back({std::to_string(r + 1), fmt17(m(r, 0)), fmt17(m(r, 1)),
                      fmt17(m(r, 2))});
  write_csv(path.string(), t);
}

void write_spectrum(const fs::path& path, const model::Mat3& m) {
  const auto ev = model::eigenvalues_3x3(m);
  CsvTable t;
  t.header = {"re", "im"};
  for (const auto& v : ev)
    t.rows.push_back({fmt17(v.real()), fmt17(v.imag())});
  write_csv(path.string(), t);
}

model::Vec3 control_center(const RunConfig& cfg) {
  if (cfg.control.center == CenterMode::equilibrium)
    return model::addiction_free_equilibrium(cfg.epidemic).vec();
  return model::Vec3::Zero();
}

control::Mat23 resolve_gain(const RunConfig& cfg,
                            const sde::ActuationMatrix& bt) {
  if (!cfg.control.gains_file.empty())
    return load_gain_csv(cfg.control.gains_file);
  const auto lin = model::linearize_addiction_free(cfg.epidemic);
  return control::solve_care(lin.A, bt, cfg.control.gamma_tilde).K;
}

// Policy configured by the [control] block, or nullopt for policy = none.
std::optional<sde::Policy> make_policy(const RunConfig& cfg,
                                       const sde::ActuationMatrix& bt) {
  if (cfg.control.policy == PolicyKind::none) return std::nullopt;
  sde::Policy pol = control::linear_policy(resolve_gain(cfg, bt),
                                           model::to_state(control_center(cfg)));
  pol.umax = cfg.control.umax;
  return pol;
}

Eigen::MatrixXd load_matrix_csv(const std::string& path, int rows) {
  const CsvTable t = read_csv(path);
  const std::size_t ir = column_index(t, "row");
  const std::size_t ic[3] = {column_index(t, "c1"), column_index(t, "c2"),
                             column_index(t, "c3")};
  if (t.rows.size() != static_cast<std::size_t>(rows))
    throw ValidationError("'" + path + "': expected " + std::to_string(rows) +
                          " data rows, found " + std::to_string(t.rows.size()));
  Eigen::MatrixXd m(rows, 3);
  std::vector<bool> seen(static_cast<std::size_t>(rows), false);
  for (const auto& row : t.rows) {
    if (row.size() < t.header.size())
      throw ValidationError("'" + path + "': short row");
    const long long r = parse_int(row[ir], "'" + path + "' column 'row'");
    if (r < 1 || r > rows)
      throw ValidationError("'" + path + "': row index " + std::to_string(r) +
                            " out of range 1.." + std::to_string(rows));
    if (seen[static_cast<std::size_t>(r - 1)])
      throw ValidationError("'" + path + "': duplicate row index " +
                            std::to_string(r));
    seen[static_cast<std::size_t>(r - 1)] = true;
    for (int c = 0; c < 3; ++c)
      m(static_cast<Eigen::Index>(r - 1), c) = parse_double(
          row[ic[c]], "'" + path + "' column 'c" + std::to_string(c + 1) + "'");
  }
  return m;
}

}  // namespace

void cmd_equilibrium(const RunConfig& cfg, const std::string& out_dir) {
  const fs::path out = prepare_out(out_dir);
  const model::PopulationState eq =
      model::addiction_free_equilibrium(cfg.epidemic);
  const double r0 = model::reproduction_number(cfg.epidemic);
  CsvTable t;
  t.header = {"x1", "x2", "x3", "z", "r0"};
  t.rows.push_back({fmt17(eq.x1), fmt17(eq.x2), fmt17(eq.x3), fmt17(eq.z()),
                    fmt17(r0)});
  write_csv((out / "equilibrium.csv").string(), t);
}

void cmd_linearize(const RunConfig& cfg, const std::string& out_dir,
                   bool debug_identity) {
  const fs::path out = prepare_out(out_dir);
  const model::Mat3 A = debug_identity
                            ? model::Mat3::Identity().eval()
                            : model::linearize_addiction_free(cfg.epidemic).A;
  write_matrix3(out / "jacobian.csv", A);
  write_spectrum(out / "eigenvalues.csv", A);
}

void cmd_riccati(const RunConfig& cfg, const std::string& out_dir) {
  const fs::path out = prepare_out(out_dir);
  const auto lin = model::linearize_addiction_free(cfg.epidemic);
  const sde::ActuationMatrix bt{cfg.control.b1, cfg.control.b2};
  const auto sol = control::solve_care(lin.A, bt, cfg.control.gamma_tilde);

  write_matrix3(out / "P.csv", sol.P);

  CsvTable k;
  k.header = {"row", "c1", "c2", "c3"};
  for (int r = 0; r < 2; ++r)
    k.rows.push_back({std::to_string(r + 1), fmt17(sol.K(r, 0)),
                      fmt17(sol.K(r, 1)), fmt17(sol.K(r, 2))});
  write_csv((out / "K.csv").string(), k);

  CsvTable s;
  s.header = {"gamma_tilde", "residual"};
  s.rows.push_back({fmt17(sol.gamma_tilde), fmt17(sol.residual)});
  write_csv((out / "riccati_summary.csv").string(), s);

  write_spectrum(out / "closed_loop_eigenvalues.csv",
                 lin.A + bt.dense() * sol.K);
}

void cmd_simulate(const RunConfig& cfg, const std::string& out_dir) {
  const fs::path out = prepare_out(out_dir);
  const sde::ActuationMatrix bt{cfg.control.b1, cfg.control.b2};
  const auto pol = make_policy(cfg, bt);
  const auto path = sde::simulate_path(cfg.initial.state(), cfg.epidemic,
                                       pol ? &*pol : nullptr, bt, cfg.sde,
                                       nullptr);
  CsvTable t;
  t.header = {"t", "x1", "x2", "x3", "z"};
  t.rows.reserve(path.trajectory.t.size());
  for (std::size_t i = 0; i < path.trajectory.t.size(); ++i) {
    const auto& x = path.trajectory.x[i];
    t.rows.push_back({fmt17(path.trajectory.t[i]), fmt17(x.x1), fmt17(x.x2),
                      fmt17(x.x3), fmt17(x.z())});
  }
  write_csv((out / "trajectory.csv").string(), t);
}

void cmd_exitstats(const RunConfig& cfg, const std::string& out_dir) {
  const fs::path out = prepare_out(out_dir);
  const exitstats::Domain d = make_domain(cfg.domain);
  const model::PopulationState s0 = cfg.initial.state();
  if (!d.contains(s0.x1, s0.x2, s0.x3))
    throw ValidationError(
        "initial state lies outside the exit domain; adjust [initial] or "
        "[domain]");
  const sde::ActuationMatrix bt{cfg.control.b1, cfg.control.b2};
  const auto pol = make_policy(cfg, bt);
  const auto ens = exitstats::run_ensemble(
      s0, cfg.epidemic, pol ? &*pol : nullptr, bt, cfg.sde, d,
      cfg.ensemble.n_paths, cfg.ensemble.threads);

  CsvTable times;
  times.header = {"path", "exit_time", "censored"};
  times.rows.reserve(ens.per_path.size());
  for (std::size_t i = 0; i < ens.per_path.size(); ++i)
    times.rows.push_back({std::to_string(i), fmt17(ens.per_path[i].time),
                          ens.per_path[i].censored ? "1" : "0"});
  write_csv((out / "exit_times.csv").string(), times);

  const auto grid = exitstats::uniform_grid(0.0, cfg.sde.t_max,
                                            cfg.ensemble.survival_points);
  const auto curve = exitstats::survival_curve(ens, grid);
  CsvTable surv;
  surv.header = {"t", "survival"};
  surv.rows.reserve(curve.size());
  for (const auto& [t, p] : curve)
    surv.rows.push_back({fmt17(t), fmt17(p)});
  write_csv((out / "survival.csv").string(), surv);

  const auto mean = exitstats::mean_exit_time(ens);
  CsvTable mt;
  mt.header = {"mean", "stderr", "n_exited", "n_censored",
               "censored_dominated"};
  mt.rows.push_back({fmt17(mean.mean), fmt17(mean.std_error),
                     std::to_string(mean.n_exited),
                     std::to_string(ens.n_censored),
                     mean.censored_dominated ? "1" : "0"});
  write_csv((out / "mean_exit.csv").string(), mt);

  // Last on purpose: a horizon with too few exits fails the rate fit, and the
  // raw outputs above should still land on disk when it does.
  exitstats::FitWindow w{};
  if (cfg.ensemble.t_lo && cfg.ensemble.t_hi)
    w = {*cfg.ensemble.t_lo, *cfg.ensemble.t_hi};
  else
    w = exitstats::default_fit_window(curve, ens.n_paths);
  const auto rate = exitstats::estimate_exit_rate(curve, w);
  CsvTable rt;
  rt.header = {"lambda_hat", "stderr", "t_lo", "t_hi", "n_points"};
  rt.rows.push_back({fmt17(rate.lambda_hat), fmt17(rate.std_error),
                     fmt17(rate.t_lo), fmt17(rate.t_hi),
                     std::to_string(rate.n_points)});
  write_csv((out / "rate.csv").string(), rt);
}

void cmd_quasipotential(const RunConfig& cfg, const std::string& out_dir) {
  const fs::path out = prepare_out(out_dir);
  model::Mat3 P;
  if (!cfg.control.p_file.empty()) {
    P = load_matrix_csv(cfg.control.p_file, 3);
  } else {
    const auto lin = model::linearize_addiction_free(cfg.epidemic);
    const sde::ActuationMatrix bt{cfg.control.b1, cfg.control.b2};
    P = control::solve_care(lin.A, bt, cfg.control.gamma_tilde).P;
  }
  const exitstats::Domain d = make_domain(cfg.domain);
  const auto q = quasipot::quasipotential(P, d, control_center(cfg),
                                                cfg.control.norm);
  CsvTable t;
  t.header = {"phi", "min_x1", "min_x2", "min_x3", "facet", "norm_kind"};
  t.rows.push_back({fmt17(q.phi), fmt17(q.minimizer[0]),
                    fmt17(q.minimizer[1]), fmt17(q.minimizer[2]),
                    q.facet_name,
                    quasipot::norm_kind_name(q.norm_kind)});
  write_csv((out / "phi.csv").string(), t);
}

void cmd_eigenrate(const RunConfig& cfg, const std::string& out_dir) {
  const fs::path out = prepare_out(out_dir);
  fdeigen::GridSpec g;
  g.lo = cfg.grid.lo;
  g.hi = cfg.grid.hi;
  g.n = {cfg.grid.n1, cfg.grid.n2, cfg.grid.n3};

  const sde::ActuationMatrix bt{cfg.control.b1, cfg.control.b2};
  fdeigen::DriftFn drift;
  if (cfg.grid.dynamics == DynamicsKind::linear) {
    model::Mat3 M = model::linearize_addiction_free(cfg.epidemic).A;
    if (cfg.control.policy == PolicyKind::linear)
      M += bt.dense() * resolve_gain(cfg, bt);
    drift = fdeigen::linear_drift(M);
  } else {
    const auto pol = make_policy(cfg, bt);
    drift = fdeigen::model_drift(cfg.epidemic, pol ? &*pol : nullptr, bt);
  }

  const auto L = fdeigen::discretize_generator(drift, cfg.sde.epsilon_noise, g);
  const auto sol = fdeigen::principal_eigenvalue(L);

  CsvTable t;
  t.header = {"lambda", "iterations", "residual", "n1", "n2", "n3"};
  t.rows.push_back({fmt17(sol.lambda), std::to_string(sol.iterations),
                    fmt17(sol.residual), std::to_string(g.n[0]),
                    std::to_string(g.n[1]), std::to_string(g.n[2])});
  write_csv((out / "lambda.csv").string(), t);

  if (cfg.grid.write_psi) {
    CsvTable psi;
    psi.header = {"i1", "i2", "i3", "x1", "x2", "x3", "psi"};
    psi.rows.reserve(g.n_interior());
    for (int j3 = 0; j3 < g.interior(2); ++j3)
      for (int j2 = 0; j2 < g.interior(1); ++j2)
        for (int j1 = 0; j1 < g.interior(0); ++j1) {
          const model::Vec3 x = g.interior_point(j1, j2, j3);
          psi.rows.push_back({std::to_string(j1 + 1), std::to_string(j2 + 1),
                              std::to_string(j3 + 1), fmt17(x[0]),
                              fmt17(x[1]), fmt17(x[2]),
                              fmt17(sol.psi[static_cast<Eigen::Index>(
                                  g.idx(j1, j2, j3))])});
        }
    write_csv((out / "psi.csv").string(), psi);
  }
}

Eigen::Matrix<double, 2, 3> load_gain_csv(const std::string& path) {
  return load_matrix_csv(path, 2);
}

}  // namespace opiexit::cli
