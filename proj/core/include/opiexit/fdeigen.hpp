#pragma once

#include <Eigen/Sparse>
#include <array>
#include <cstddef>
#include <functional>

#include "opiexit/exitstats.hpp"
#include "opiexit/model.hpp"
#include "opiexit/sde.hpp"

namespace opiexit::fdeigen {

using model::Vec3;

// Tensor grid over a box; n[k] counts points per axis including the two
// boundary layers, so the interior is (n1-2)(n2-2)(n3-2) unknowns.
struct GridSpec {
  Vec3 lo, hi;
  std::array<int, 3> n;

  double h(int axis) const { return (hi[axis] - lo[axis]) / (n[axis] - 1); }
  int interior(int axis) const { return n[axis] - 2; }
  std::size_t n_interior() const {
    return std::size_t(interior(0)) * interior(1) * interior(2);
  }
  // j_k are 0-based interior indices (full-grid index minus one).
  std::size_t idx(int j1, int j2, int j3) const {
    return std::size_t(j1) +
           std::size_t(interior(0)) * (std::size_t(j2) +
                                       std::size_t(interior(1)) * j3);
  }
  Vec3 interior_point(int j1, int j2, int j3) const {
    return Vec3(lo[0] + (j1 + 1) * h(0), lo[1] + (j2 + 1) * h(1),
                lo[2] + (j3 + 1) * h(2));
  }
  exitstats::Domain box() const;
};

void validate(const GridSpec& g);

using DriftFn = std::function<Vec3(const Vec3&)>;

// Drift of the compartmental model with optional feedback, evaluated at
// absolute coordinates. The policy is copied.
DriftFn model_drift(const model::EpidemicParams& p, const sde::Policy* pol,
                    const sde::ActuationMatrix& bt);
// b(x) = M x + c (deviation coordinates for the closed-loop linearization).
DriftFn linear_drift(const model::Mat3& M, const Vec3& c = Vec3::Zero());

// Generator L = (eps/2) d^2/dx1^2 + <b(x), grad> on the interior of the grid
// box with zero Dirichlet data, second-order central in the x1 diffusion and
// first-order upwind in every drift term. The upwind choice makes -L an
// M-matrix: off-diagonals <= 0, inverse nonnegative, hence a real positive
// principal eigenvalue with a positive eigenfunction at the discrete level.
Eigen::SparseMatrix<double> discretize_generator(const DriftFn& b,
                                                 double eps_noise,
                                                 const GridSpec& g);

struct EigenSolution {
  double lambda = 0.0;     // principal eigenvalue of -L (smallest modulus)
  Eigen::VectorXd psi;     // interior values, normalized to max = 1
  int iterations = 0;
  double residual = 0.0;   // |(-L) psi - lambda psi|_2 / |psi|_2
};

// Inverse power iteration on -L (sparse LU factorization, shift 0, Rayleigh
// polish). Throws ComputationError on non-convergence or if the converged
// vector has mixed signs (discretization too coarse).
EigenSolution principal_eigenvalue(const Eigen::SparseMatrix<double>& L);

// Per-interior-node gradient of psi: central differences inside, one-sided
// three-point stencils at boundary-adjacent nodes (exact on quadratics).
// Row i of the result is grad psi at interior node i.
Eigen::Matrix<double, Eigen::Dynamic, 3> gradient_field(const EigenSolution& s,
                                                        const GridSpec& g);

// Piecewise-constant (nearest interior node) view of a gradient field, in the
// shape bang_bang_policy consumes.
std::function<Vec3(const model::PopulationState&)> gradient_interpolant(
    const GridSpec& g, const Eigen::Matrix<double, Eigen::Dynamic, 3>& grad);

struct EvmCase {
  sde::AffineDynamics dyn;
  double eps;
  GridSpec grid;     // the grid box doubles as the Monte Carlo exit domain
  Vec3 x0;
  std::size_t n_paths;
  double dt;
  double t_max;
  std::uint64_t seed;
  std::size_t n_threads = 0;
};

struct EvmReport {
  double lambda_fd;
  double lambda_mc;
  double mc_std_error;
  double relative_gap;  // |fd - mc| / fd
};

// Runs the finite-difference eigensolve and the Monte Carlo exit-rate fit on
// the same dynamics and domain, and reports the gap between the two rate
// estimates.
EvmReport eigen_vs_montecarlo(const EvmCase& c);

}  // namespace opiexit::fdeigen
