#pragma once

// Test-side reference implementations. Everything here is computed by a
// different route than the library under test (separate discretizations,
// separate solvers, separate integrators) so agreement is evidence, not
// tautology.

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "opiexit/model.hpp"

namespace oracles {

// Central finite differences of the model drift, column by column.
Eigen::Matrix3d fd_jacobian(const opiexit::model::EpidemicParams& p,
                            const opiexit::model::PopulationState& s,
                            double h = 1e-6);

// Plain explicit Euler on the compartment rate equations, coded from scratch
// (no call into the library drift). Returns the state after n_steps of size
// dt with zero noise.
opiexit::model::PopulationState euler_reference(
    const opiexit::model::PopulationState& s0,
    const opiexit::model::EpidemicParams& p, double dt, int n_steps);

// 1-D Ornstein-Uhlenbeck oracles for dx = -a x dt + sqrt(eps) dW on (-r, r)
// with absorbing ends.
//
// Mean exit time started at 0: two-point boundary value problem
// (eps/2) m'' - a x m' = -1, m(+-r) = 0, central differences on n nodes,
// solved by the Thomas algorithm.
double ou_mean_exit_bvp(double a, double eps, double r, int n = 20001);

// Principal Dirichlet eigenvalue of -(eps/2) psi'' + a x psi' on (-r, r):
// tridiagonal finite differences (central drift by default, first-order
// upwind when requested to mirror the library's stencil), inverse power
// iteration with Thomas solves and a Rayleigh quotient.
double ou_principal_eigenvalue(double a, double eps, double r, int n = 3201,
                               bool upwind_drift = false);

// P = integral_0^T exp(A^T t) Q exp(A t) dt, computed by RK4 on
// V' = A^T V + V A, V(0) = Q, accumulating the integral alongside. Valid for
// Hurwitz A with T large enough that the tail is below tolerance.
Eigen::Matrix3d lyapunov_by_quadrature(const Eigen::Matrix3d& A,
                                       const Eigen::Matrix3d& Q,
                                       double t_end = 400.0,
                                       int steps = 40000);

// Two-sample Kolmogorov-Smirnov statistic sup_t |F_a(t) - F_b(t)|.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

struct PairedT {
  double mean = 0.0;  // mean difference
  double sd = 0.0;    // sample standard deviation of the differences
  double t = 0.0;     // mean / (sd / sqrt(n))
  int n = 0;
};
PairedT paired_t(const std::vector<double>& diffs);

// ---- plumbing shared by the test binaries ----------------------------------

// Runs a shell command, capturing interleaved stdout+stderr.
struct RunResult {
  int exit_code = -1;
  std::string out;
};
RunResult run_process(const std::string& command_line);

std::string read_file(const std::string& path);

// Creates (wiping first) a scratch directory under the working directory and
// returns its path.
std::string fresh_dir(const std::string& name);

// what() of the exception thrown by fn, or "" if nothing was thrown.
template <class E, class Fn>
std::string message_of(Fn&& fn) {
  try {
    fn();
  } catch (const E& e) {
    return e.what();
  }
  return "";
}

inline bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace oracles
