#include "opiexit/quasipotential.hpp"

#include <cmath>
#include <limits>

namespace opiexit::quasipot {

const char* norm_kind_name(NormKind k) {
  return k == NormKind::spectral ? "spectral" : "frobenius";
}

double matrix_norm_spectral(const Mat3& P) {
  const auto eigs = model::eigenvalues_3x3(P);
  double m = 0.0;
  for (const auto& ev : eigs) m = std::max(m, std::abs(ev));
  return m;
}

double matrix_norm(const Mat3& P, NormKind k) {
  return k == NormKind::spectral ? matrix_norm_spectral(P) : P.norm();
}

namespace {

struct Candidate {
  double q = std::numeric_limits<double>::infinity();
  Vec3 x = Vec3::Zero();
  int facet = -1;
};

// Keep `cand` if it satisfies every constraint not in the active set and
// improves on `best`.
void consider(const exitstats::Domain& d, const Mat3& P, const Vec3& center,
              const Vec3& x, int facet, double tol, Candidate& best) {
  const auto& faces = d.facets();
  for (std::size_t l = 0; l < faces.size(); ++l) {
    if (static_cast<int>(l) == facet) continue;
    if (faces[l].a.dot(x) > faces[l].b + tol) return;
  }
  const Vec3 dx = x - center;
  const double q = dx.dot(P * dx);
  if (q < best.q) best = {q, x, facet};
}

}  // namespace

QuasipotentialResult quasipotential(const Mat3& P, const exitstats::Domain& d,
                                    const Vec3& center, NormKind norm) {
  const double pnorm = P.norm();
  if ((P - P.transpose()).norm() > 1e-8 * std::max(pnorm, 1e-300))
    throw ValidationError("quasipotential needs a symmetric matrix P");
  const Mat3 Ps = ((P + P.transpose()) / 2.0).eval();
  const auto eigs = model::eigenvalues_3x3(Ps);
  for (const auto& ev : eigs)
    if (ev.real() < -1e-10 * std::max(pnorm, 1e-300))
      throw ValidationError(
          "quasipotential needs a positive semidefinite matrix P");
  if (!d.contains(center))
    throw ValidationError("quasipotential center must lie inside the domain");

  const auto& faces = d.facets();
  const int m = static_cast<int>(faces.size());
  double geom = 1.0;
  for (const auto& f : faces) geom = std::max(geom, std::abs(f.b));
  const double tol = 1e-10 * geom;

  Candidate best;

  // Stationary point on each facet plane: minimize (x-c)^T P (x-c) subject
  // to a.x = b via the KKT system [2P a; a^T 0] [x; l] = [2Pc; b].
  for (int i = 0; i < m; ++i) {
    Eigen::Matrix4d kkt = Eigen::Matrix4d::Zero();
    kkt.topLeftCorner<3, 3>() = 2.0 * Ps;
    kkt.topRightCorner<3, 1>() = faces[i].a;
    kkt.bottomLeftCorner<1, 3>() = faces[i].a.transpose();
    Eigen::Vector4d rhs;
    rhs.head<3>() = 2.0 * Ps * center;
    rhs[3] = faces[i].b;
    Eigen::FullPivLU<Eigen::Matrix4d> lu(kkt);
    if (!lu.isInvertible()) continue;  // singular subset: covered by edges
    const Eigen::Vector4d sol = lu.solve(rhs);
    consider(d, Ps, center, sol.head<3>(), i, tol, best);
  }

  // Edges: stationary point subject to two facet equalities.
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      Eigen::Matrix<double, 5, 5> kkt = Eigen::Matrix<double, 5, 5>::Zero();
      kkt.topLeftCorner<3, 3>() = 2.0 * Ps;
      kkt.block<3, 1>(0, 3) = faces[i].a;
      kkt.block<3, 1>(0, 4) = faces[j].a;
      kkt.block<1, 3>(3, 0) = faces[i].a.transpose();
      kkt.block<1, 3>(4, 0) = faces[j].a.transpose();
      Eigen::Matrix<double, 5, 1> rhs;
      rhs.head<3>() = 2.0 * Ps * center;
      rhs[3] = faces[i].b;
      rhs[4] = faces[j].b;
      Eigen::FullPivLU<Eigen::Matrix<double, 5, 5>> lu(kkt);
      if (!lu.isInvertible()) continue;
      const auto sol = lu.solve(rhs);
      consider(d, Ps, center, sol.template head<3>(), i, tol, best);
    }
  }

  // Vertices: three facet equalities pin the point outright.
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      for (int k = j + 1; k < m; ++k) {
        Mat3 Aeq;
        Aeq.row(0) = faces[i].a.transpose();
        Aeq.row(1) = faces[j].a.transpose();
        Aeq.row(2) = faces[k].a.transpose();
        Vec3 beq(faces[i].b, faces[j].b, faces[k].b);
        Eigen::FullPivLU<Mat3> lu(Aeq);
        if (!lu.isInvertible()) continue;
        consider(d, Ps, center, lu.solve(beq), i, tol, best);
      }
    }
  }

  if (best.facet < 0)
    throw ComputationError(
        "quasipotential boundary search found no feasible candidate "
        "(degenerate domain)");

  const double nrm = matrix_norm(Ps, norm);
  QuasipotentialResult r;
  r.phi = nrm > 0.0 ? best.q / (2.0 * nrm) : 0.0;
  r.minimizer = best.x;
  r.facet = best.facet;
  r.facet_name = faces[best.facet].name;
  r.norm_kind = norm;
  return r;
}

std::vector<ScalingRow> log_residence_scaling(double phi,
                                              const ScalingSetup& setup,
                                              const std::vector<double>& eps_list,
                                              std::size_t n_paths) {
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1]))
      throw ValidationError("eps_list must be strictly decreasing");
  std::vector<ScalingRow> rows;
  rows.reserve(eps_list.size());
  for (const double eps : eps_list) {
    if (!(eps > 0.0)) throw ValidationError("eps values must be > 0");
    sde::SdeConfig cfg;
    cfg.epsilon_noise = eps;
    cfg.dt = setup.dt_ref * setup.eps_ref / eps;
    cfg.t_max = setup.t_max;
    cfg.seed = setup.seed;
    const auto ens = exitstats::run_ensemble(setup.x0, setup.dyn, cfg,
                                             setup.domain, n_paths,
                                             setup.n_threads);
    const auto me = exitstats::mean_exit_time(ens);
    ScalingRow r;
    r.eps = eps;
    r.mean_exit = me.mean;
    r.eps_ln_mean_exit = eps * std::log(me.mean);
    r.phi = phi;
    r.censored_dominated = me.censored_dominated;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace opiexit::quasipot
