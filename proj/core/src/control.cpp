#include "opiexit/control.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace opiexit::control {

Mat3 solve_lyapunov(const Mat3& A, const Mat3& Q) {
  // Column-major vectorization: vec(A^T P) = (I (x) A^T) vec(P),
  // vec(P A) = (A^T (x) I) vec(P).
  Eigen::Matrix<double, 9, 9> M = Eigen::Matrix<double, 9, 9>::Zero();
  for (int j = 0; j < 3; ++j) M.block<3, 3>(3 * j, 3 * j) += A.transpose();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      M.block<3, 3>(3 * i, 3 * j) += A(j, i) * Mat3::Identity();

  Eigen::Matrix<double, 9, 1> q;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) q[3 * j + i] = -Q(i, j);

  Eigen::FullPivLU<Eigen::Matrix<double, 9, 9>> lu(M);
  if (!lu.isInvertible())
    throw ComputationError(
        "Lyapunov operator is singular (A and -A share an eigenvalue)");
  const Eigen::Matrix<double, 9, 1> p = lu.solve(q);
  Mat3 P;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) P(i, j) = p[3 * j + i];
  return P;
}

RiccatiSolution solve_care(const Mat3& A, const sde::ActuationMatrix& bt,
                           double gamma_tilde, const CareOptions& opt) {
  if (!(gamma_tilde > 0.0) || !std::isfinite(gamma_tilde))
    throw ValidationError("gamma_tilde must be > 0");
  if (!(bt.b1 >= 0.0 && bt.b2 >= 0.0))
    throw ValidationError("actuation entries b1, b2 must be >= 0");

  const Eigen::Matrix<double, 3, 2> B = bt.dense();
  const Mat2 R = opt.R.value_or(gamma_tilde * Mat2::Identity());
  const Mat2 Rinv = R.inverse();

  auto residual_norm = [&](const Mat3& P) {
    const Mat3 res = A.transpose() * P + P * A + opt.Q -
                     P * B * Rinv * B.transpose() * P;
    return res.norm();
  };

  Mat23 K = Mat23::Zero();
  Mat3 P = Mat3::Zero();
  double resid = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    const Mat3 Acl = A + B * K;
    const Mat3 rhs = opt.Q + K.transpose() * R * K;
    P = solve_lyapunov(Acl, rhs);
    P = ((P + P.transpose()) / 2.0).eval();
    K = -Rinv * B.transpose() * P;
    resid = residual_norm(P);
    const double scale =
        std::max(1.0, P.squaredNorm() / gamma_tilde);
    if (resid <= opt.tol * scale) break;
  }
  const double scale = std::max(1.0, P.squaredNorm() / gamma_tilde);
  if (resid > opt.tol * scale) {
    std::ostringstream msg;
    msg << "Riccati iteration did not converge after " << opt.max_iter
        << " iterations; last residual " << resid;
    throw ComputationError(msg.str());
  }

  // Contract checks: symmetric positive definite P, Hurwitz closed loop.
  const auto p_eigs = model::eigenvalues_3x3(P);
  for (const auto& ev : p_eigs)
    if (!(ev.real() > 0.0))
      throw ComputationError(
          "Riccati solution lost positive definiteness (ill-posed inputs)");
  const auto cl_eigs = model::eigenvalues_3x3(A + B * K);
  for (const auto& ev : cl_eigs)
    if (!(ev.real() < 0.0))
      throw ComputationError(
          "Riccati closed loop is not Hurwitz (ill-posed inputs)");

  RiccatiSolution sol;
  sol.P = P;
  sol.gamma_tilde = gamma_tilde;
  sol.K = K;
  sol.residual = resid;
  return sol;
}

Mat23 feedback_gain(const Mat3& P, const sde::ActuationMatrix& bt,
                    double gamma_tilde) {
  if (!(gamma_tilde > 0.0))
    throw ValidationError("gamma_tilde must be > 0");
  return -(1.0 / gamma_tilde) * bt.dense().transpose() * P;
}

sde::Policy linear_policy(const Mat23& K, const PopulationState& center) {
  const Vec3 c = center.vec();
  return sde::Policy{
      [K, c](const PopulationState& s) -> Eigen::Vector2d {
        return K * (s.vec() - c);
      },
      std::nullopt};
}

sde::Policy bang_bang_policy(
    std::function<Vec3(const PopulationState&)> grad_psi,
    const sde::ActuationMatrix& bt, double umax) {
  if (!(umax > 0.0))
    throw ValidationError("bang_bang_policy needs umax > 0 (compact control box)");
  const double b1 = bt.b1, b2 = bt.b2;
  return sde::Policy{
      [g = std::move(grad_psi), b1, b2, umax](
          const PopulationState& s) -> Eigen::Vector2d {
        const Vec3 gp = g(s);
        const double w1 = b1 * gp[0];
        const double w2 = b2 * gp[2];
        auto bang = [umax](double w) {
          return w > 0.0 ? umax : (w < 0.0 ? -umax : 0.0);
        };
        return Eigen::Vector2d(bang(w1), bang(w2));
      },
      std::nullopt};
}

}  // namespace opiexit::control
