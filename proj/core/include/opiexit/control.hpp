#pragma once

#include <functional>
#include <optional>

#include "opiexit/model.hpp"
#include "opiexit/sde.hpp"

namespace opiexit::control {

using model::Mat3;
using model::PopulationState;
using model::Vec3;
using Mat23 = Eigen::Matrix<double, 2, 3>;
using Mat2 = Eigen::Matrix2d;

struct RiccatiSolution {
  Mat3 P;  // symmetric positive definite
  double gamma_tilde;
  Mat23 K;          // K = -R^{-1} B~^T P; with R = gamma_tilde I this is
                    // -(1/gamma_tilde) B~^T P
  double residual;  // Frobenius norm of A^T P + P A + Q - P B~ R^{-1} B~^T P
};

struct CareOptions {
  Mat3 Q = Mat3::Identity();
  std::optional<Mat2> R;  // defaults to gamma_tilde * I2
  double tol = 1e-10;     // residual target, relative to max(1, |P|_F^2/gamma)
  int max_iter = 100;
};

// A^T P + P A + Q = 0 solved exactly by 9x9 Kronecker vectorization.
Mat3 solve_lyapunov(const Mat3& A, const Mat3& Q);

// Stabilizing solution of A^T P + P A + Q - P B~ R^{-1} B~^T P = 0 by
// Newton-Kleinman iteration started at K0 = 0 (valid when A is Hurwitz).
// Each iterate is one Lyapunov solve; P is symmetrized after every solve.
// Throws ComputationError on non-convergence (carrying the last residual) or
// if P loses symmetry/definiteness, or the closed loop fails to be Hurwitz.
RiccatiSolution solve_care(const Mat3& A, const sde::ActuationMatrix& bt,
                           double gamma_tilde, const CareOptions& opt = {});

// Row 1 = -(b1/gamma) * (row 1 of P); row 2 = -(b2/gamma) * (row 3 of P).
Mat23 feedback_gain(const Mat3& P, const sde::ActuationMatrix& bt,
                    double gamma_tilde);

// u(x) = K (x - center). The default center = 0 applies the gain to the
// absolute state; pass the equilibrium to control the deviation instead.
sde::Policy linear_policy(const Mat23& K,
                          const PopulationState& center = {0.0, 0.0, 0.0});

// u_j(x) = umax * sign((B~^T grad_psi(x))_j), 0 on exact ties: the argmax of
// <B~ u, grad_psi> over the box [-umax, umax]^2.
sde::Policy bang_bang_policy(
    std::function<Vec3(const PopulationState&)> grad_psi,
    const sde::ActuationMatrix& bt, double umax);

}  // namespace opiexit::control
