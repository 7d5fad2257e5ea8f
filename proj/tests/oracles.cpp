#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace oracles {

using opiexit::model::EpidemicParams;
using opiexit::model::PopulationState;

Eigen::Matrix3d fd_jacobian(const EpidemicParams& p, const PopulationState& s,
                            double h) {
  Eigen::Matrix3d J;
  const double base[3] = {s.x1, s.x2, s.x3};
  for (int j = 0; j < 3; ++j) {
    double plus[3] = {base[0], base[1], base[2]};
    double minus[3] = {base[0], base[1], base[2]};
    plus[j] += h;
    minus[j] -= h;
    const Eigen::Vector3d fp =
        opiexit::model::drift({plus[0], plus[1], plus[2]}, p);
    const Eigen::Vector3d fm =
        opiexit::model::drift({minus[0], minus[1], minus[2]}, p);
    J.col(j) = (fp - fm) / (2.0 * h);
  }
  return J;
}

PopulationState euler_reference(const PopulationState& s0,
                                const EpidemicParams& p, double dt,
                                int n_steps) {
  double x1 = s0.x1, x2 = s0.x2, x3 = s0.x3;
  for (int i = 0; i < n_steps; ++i) {
    const double z = 1.0 - x1 - x2 - x3;
    const double f1 = -p.alpha * x1 - p.beta * (1.0 - p.xi) * x1 * x2 -
                      p.beta * p.xi * x1 * z + (p.varepsilon + p.mu) * z +
                      (p.delta + p.mu) * x3 + p.mu_star * x2;
    const double f2 = p.gamma * z + p.sigma * x3 +
                      p.beta * (1.0 - p.xi) * x1 * x2 +
                      p.beta * p.xi * x1 * z + p.nu * x3 * x2 -
                      (p.zeta + p.mu_star) * x2;
    const double f3 =
        p.zeta * x2 - p.mu * x3 * x2 - (p.delta + p.sigma + p.mu) * x3;
    x1 = x1 + f1 * dt;
    x2 = x2 + f2 * dt;
    x3 = x3 + f3 * dt;
  }
  return {x1, x2, x3};
}

namespace {

// Solves the tridiagonal system in place; lo/di/up are the three diagonals
// (lo[0] and up[m-1] unused), d the right-hand side. Returns the solution in
// d.
void thomas(std::vector<double>& lo, std::vector<double>& di,
            std::vector<double>& up, std::vector<double>& d) {
  const std::size_t m = di.size();
  for (std::size_t i = 1; i < m; ++i) {
    const double w = lo[i] / di[i - 1];
    di[i] -= w * up[i - 1];
    d[i] -= w * d[i - 1];
  }
  d[m - 1] /= di[m - 1];
  for (std::size_t i = m - 1; i-- > 0;)
    d[i] = (d[i] - up[i] * d[i + 1]) / di[i];
}

}  // namespace

double ou_mean_exit_bvp(double a, double eps, double r, int n) {
  const int m = n - 2;
  const double h = 2.0 * r / (n - 1);
  std::vector<double> lo(m), di(m), up(m), d(m, -1.0);
  const double diff = eps / (2.0 * h * h);
  for (int i = 0; i < m; ++i) {
    const double x = -r + (i + 1) * h;
    const double adv = -a * x / (2.0 * h);
    lo[i] = diff - adv;
    di[i] = -2.0 * diff;
    up[i] = diff + adv;
  }
  thomas(lo, di, up, d);
  return d[m / 2];  // n odd => middle interior node sits at x = 0
}

double ou_principal_eigenvalue(double a, double eps, double r, int n,
                               bool upwind_drift) {
  const int m = n - 2;
  const double h = 2.0 * r / (n - 1);
  // Diagonals of M = -L where L = (eps/2) d^2/dx^2 - a x d/dx.
  std::vector<double> lo(m), di(m), up(m);
  const double diff = eps / (2.0 * h * h);
  for (int i = 0; i < m; ++i) {
    const double x = -r + (i + 1) * h;
    const double b = -a * x;  // drift
    lo[i] = -diff;
    di[i] = 2.0 * diff;
    up[i] = -diff;
    if (upwind_drift) {
      const double w = b / h;
      di[i] += std::abs(w);
      if (w > 0)
        up[i] -= w;
      else
        lo[i] += w;
    } else {
      const double adv = b / (2.0 * h);
      up[i] -= adv;
      lo[i] += adv;
    }
  }
  std::vector<double> v(m, 1.0 / std::sqrt(double(m)));
  double lam = 0.0;
  for (int it = 0; it < 5000; ++it) {
    std::vector<double> L = lo, D = di, U = up, w = v;
    thomas(L, D, U, w);
    double nrm = 0.0;
    for (double x : w) nrm += x * x;
    nrm = std::sqrt(nrm);
    for (double& x : w) x /= nrm;
    // Rayleigh quotient v^T M v.
    double q = 0.0;
    for (int i = 0; i < m; ++i) {
      double s = di[i] * w[i];
      if (i > 0) s += lo[i] * w[i - 1];
      if (i + 1 < m) s += up[i] * w[i + 1];
      q += w[i] * s;
    }
    v.swap(w);
    if (std::abs(q - lam) <= 1e-14 * std::max(1.0, std::abs(q))) return q;
    lam = q;
  }
  return lam;
}

Eigen::Matrix3d lyapunov_by_quadrature(const Eigen::Matrix3d& A,
                                       const Eigen::Matrix3d& Q, double t_end,
                                       int steps) {
  const double h = t_end / steps;
  Eigen::Matrix3d V = Q;
  Eigen::Matrix3d S = Eigen::Matrix3d::Zero();
  const Eigen::Matrix3d At = A.transpose();
  auto f = [&](const Eigen::Matrix3d& M) -> Eigen::Matrix3d {
    return At * M + M * A;
  };
  for (int i = 0; i < steps; ++i) {
    const Eigen::Matrix3d k1 = f(V);
    const Eigen::Matrix3d k2 = f(V + 0.5 * h * k1);
    const Eigen::Matrix3d k3 = f(V + 0.5 * h * k2);
    const Eigen::Matrix3d k4 = f(V + h * k3);
    // Integral accumulates the same RK4 stages (the integrand IS V).
    const Eigen::Matrix3d v2 = V + 0.5 * h * k1;
    const Eigen::Matrix3d v3 = V + 0.5 * h * k2;
    const Eigen::Matrix3d v4 = V + h * k3;
    S += (h / 6.0) * (V + 2.0 * v2 + 2.0 * v3 + v4);
    V += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return S;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = double(a.size()), nb = double(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::abs(double(i) / na - double(j) / nb));
  }
  return d;
}

PairedT paired_t(const std::vector<double>& diffs) {
  PairedT r;
  r.n = int(diffs.size());
  if (r.n == 0) return r;
  double s = 0.0;
  for (double d : diffs) s += d;
  r.mean = s / r.n;
  double v = 0.0;
  for (double d : diffs) v += (d - r.mean) * (d - r.mean);
  r.sd = r.n > 1 ? std::sqrt(v / (r.n - 1)) : 0.0;
  r.t = r.sd > 0.0 ? r.mean / (r.sd / std::sqrt(double(r.n))) : 0.0;
  return r;
}

RunResult run_process(const std::string& command_line) {
  RunResult r;
  FILE* pipe = popen((command_line + " 2>&1").c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed: " + command_line);
  char buf[4096];
  while (std::size_t got = fread(buf, 1, sizeof buf, pipe))
    r.out.append(buf, got);
  const int status = pclose(pipe);
  r.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fresh_dir(const std::string& name) {
  const std::string path = "scratch/" + name;
  std::filesystem::remove_all(path);
  std::filesystem::create_directories(path);
  return path;
}

}  // namespace oracles
