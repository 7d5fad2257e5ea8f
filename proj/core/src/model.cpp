#include "opiexit/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace opiexit::model {

EpidemicParams default_params() {
  EpidemicParams p{};
  p.alpha = 0.15;
  p.beta = 0.0036;
  p.xi = 0.74;
  p.varepsilon = 3.0;
  p.delta = 0.1;
  p.mu = 0.007288;
  p.mu_star = 0.01155;
  p.gamma = 0.00744;
  p.zeta = 0.25;
  p.nu = 0.2;
  p.sigma = 0.7;
  return p;
}

EpidemicParams addiction_free_params() {
  EpidemicParams p = default_params();
  p.gamma = 0.0;
  p.xi = 0.0;
  return p;
}

void validate(const EpidemicParams& p) {
  auto nonneg = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw ValidationError(std::string("epidemic parameter '") + name +
                            "' must be finite and >= 0");
  };
  nonneg(p.alpha, "alpha");
  nonneg(p.beta, "beta");
  nonneg(p.xi, "xi");
  nonneg(p.varepsilon, "varepsilon");
  nonneg(p.delta, "delta");
  nonneg(p.mu, "mu");
  nonneg(p.mu_star, "mu_star");
  nonneg(p.gamma, "gamma");
  nonneg(p.zeta, "zeta");
  nonneg(p.nu, "nu");
  nonneg(p.sigma, "sigma");
  if (p.beta > 1.0)
    throw ValidationError("epidemic parameter 'beta' must lie in [0, 1]");
  if (p.xi > 1.0)
    throw ValidationError("epidemic parameter 'xi' must lie in [0, 1]");
  if (p.mu_star < p.mu)
    throw ValidationError(
        "epidemic parameter 'mu_star' must be >= 'mu' (it adds the overdose "
        "rate on top of natural death)");
}

Vec3 drift(const PopulationState& s, const EpidemicParams& p) {
  const double x1 = s.x1, x2 = s.x2, x3 = s.x3;
  const double z = 1.0 - x1 - x2 - x3;
  const double f1 = -p.alpha * x1 - p.beta * (1.0 - p.xi) * x1 * x2 -
                    p.beta * p.xi * x1 * z + (p.varepsilon + p.mu) * z +
                    (p.delta + p.mu) * x3 + p.mu_star * x2;
  const double f2 = p.gamma * z + p.sigma * x3 +
                    p.beta * (1.0 - p.xi) * x1 * x2 + p.beta * p.xi * x1 * z +
                    p.nu * x3 * x2 - (p.zeta + p.mu_star) * x2;
  const double f3 = p.zeta * x2 - p.mu * x3 * x2 -
                    (p.delta + p.sigma + p.mu) * x3;
  return Vec3(f1, f2, f3);
}

PopulationState addiction_free_equilibrium(const EpidemicParams& p) {
  validate(p);
  if (p.gamma != 0.0)
    throw ValidationError(
        "addiction_free_equilibrium requires gamma = 0 (no prescribed-user "
        "addiction inflow)");
  if (p.xi != 0.0)
    throw ValidationError(
        "addiction_free_equilibrium requires xi = 0 (no leftover-prescription "
        "addiction pathway)");
  const double denom = p.alpha + p.varepsilon + p.mu;
  if (denom <= 0.0)
    throw ValidationError(
        "addiction_free_equilibrium requires alpha + varepsilon + mu > 0");
  return {(p.varepsilon + p.mu) / denom, 0.0, 0.0};
}

Mat3 jacobian(const PopulationState& s, const EpidemicParams& p) {
  const double x1 = s.x1, x2 = s.x2, x3 = s.x3;
  const double z = 1.0 - x1 - x2 - x3;
  // d z / d x_i = -1 throughout.
  Mat3 J;
  J(0, 0) = -p.alpha - p.beta * (1.0 - p.xi) * x2 - p.beta * p.xi * (z - x1) -
            (p.varepsilon + p.mu);
  J(0, 1) = -p.beta * (1.0 - p.xi) * x1 + p.beta * p.xi * x1 -
            (p.varepsilon + p.mu) + p.mu_star;
  J(0, 2) = p.beta * p.xi * x1 - (p.varepsilon + p.mu) + (p.delta + p.mu);
  J(1, 0) = -p.gamma + p.beta * (1.0 - p.xi) * x2 + p.beta * p.xi * (z - x1);
  J(1, 1) = -p.gamma + p.beta * (1.0 - p.xi) * x1 - p.beta * p.xi * x1 +
            p.nu * x3 - (p.zeta + p.mu_star);
  J(1, 2) = -p.gamma + p.sigma - p.beta * p.xi * x1 + p.nu * x2;
  J(2, 0) = 0.0;
  J(2, 1) = p.zeta - p.mu * x3;
  J(2, 2) = -p.mu * x2 - (p.delta + p.sigma + p.mu);
  return J;
}

LinearModel linearize_addiction_free(const EpidemicParams& p) {
  LinearModel m;
  m.equilibrium = addiction_free_equilibrium(p);
  m.A = jacobian(m.equilibrium, p);
  return m;
}

double reproduction_number(const EpidemicParams& p) {
  if (p.gamma != 0.0 || p.xi != 0.0)
    throw ValidationError(
        "reproduction_number is defined at the addiction-free regime: gamma "
        "and xi must both be 0");
  const double out = p.delta + p.sigma + p.mu;
  const double denom = (p.zeta + p.mu_star) * out - p.sigma * p.zeta;
  if (denom <= 0.0)
    throw ValidationError(
        "reproduction_number: (zeta+mu_star)(delta+sigma+mu) - sigma*zeta "
        "must be positive");
  const double x1s = addiction_free_equilibrium(p).x1;
  return p.beta * x1s * out / denom;
}

namespace {

using cplx = std::complex<double>;

// p(x) = x^3 + a2 x^2 + a1 x + a0 and its derivative.
inline cplx cubic(const cplx& x, double a2, double a1, double a0) {
  return ((x + a2) * x + a1) * x + a0;
}
inline cplx cubic_d(const cplx& x, double a2, double a1) {
  return (3.0 * x + 2.0 * a2) * x + a1;
}

}  // namespace

std::array<cplx, 3> eigenvalues_3x3(const Mat3& A) {
  // Characteristic polynomial lambda^3 + a2 lambda^2 + a1 lambda + a0.
  const double a2 = -A.trace();
  const double a1 = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0) +
                    A(0, 0) * A(2, 2) - A(0, 2) * A(2, 0) +
                    A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1);
  const double a0 = -A.determinant();

  // Depressed form t^3 + p t + q with lambda = t - a2/3.
  const double shift = a2 / 3.0;
  const double p = a1 - a2 * a2 / 3.0;
  const double q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;

  std::array<cplx, 3> r;
  const double disc = -4.0 * p * p * p - 27.0 * q * q;
  // Degeneracy scale from the coefficients themselves (|roots| are bounded
  // by ~2*sc), so a matrix like the identity with p = q = 0 exactly is
  // routed here instead of dividing 0/0 in the trigonometric branch.
  const double sc = std::max({std::abs(a2), std::sqrt(std::abs(a1)),
                              std::cbrt(std::abs(a0)), 1e-150});
  if (std::abs(p) < 1e-14 * sc * sc && std::abs(q) < 1e-14 * sc * sc * sc) {
    // Near-triple root.
    const double t = std::cbrt(-q);
    r = {cplx(t), cplx(t), cplx(t)};
  } else if (disc >= 0.0) {
    // Three real roots (p < 0 here): trigonometric form.
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg =
        std::clamp(3.0 * q / (p * m), -1.0, 1.0);  // = cos(3 theta)
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k)
      r[k] = cplx(m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0));
  } else {
    // One real root and a conjugate pair: Cardano.
    const double half_q = q / 2.0;
    const double s = std::sqrt(half_q * half_q + p * p * p / 27.0);
    const double u = std::cbrt(-half_q + s);
    const double v = std::cbrt(-half_q - s);
    const double real_t = u + v;
    const double im = std::sqrt(3.0) / 2.0 * (u - v);
    r = {cplx(real_t), cplx(-real_t / 2.0, im), cplx(-real_t / 2.0, -im)};
  }

  for (auto& t : r) t -= shift;

  // One Newton polish per root on the original polynomial.
  for (auto& x : r) {
    const cplx d = cubic_d(x, a2, a1);
    if (std::abs(d) > 0.0) x -= cubic(x, a2, a1, a0) / d;
  }

  std::sort(r.begin(), r.end(), [](const cplx& u, const cplx& v) {
    if (u.real() != v.real()) return u.real() < v.real();
    return u.imag() < v.imag();
  });
  return r;
}

EigenPairs3 eigenpairs_3x3(const Mat3& A) {
  EigenPairs3 out;
  out.values = eigenvalues_3x3(A);
  const double anorm = std::max(A.norm(), 1e-300);
  for (int k = 0; k < 3; ++k) {
    Eigen::Matrix3cd M = A.cast<cplx>();
    M.diagonal().array() -= out.values[k];
    // Rows of (A - lambda I) are orthogonal to the eigenvector, so a cross
    // product of two independent rows recovers it.
    Eigen::Vector3cd best = Eigen::Vector3cd::Zero();
    double best_norm = 0.0;
    const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (auto& pr : pairs) {
      // Unconjugated cross product: Eigen's cross() conjugates complex
      // results, which breaks the plain bilinear orthogonality r . c = 0
      // needed here.
      const Eigen::RowVector3cd a = M.row(pr[0]);
      const Eigen::RowVector3cd b = M.row(pr[1]);
      const Eigen::Vector3cd c(a[1] * b[2] - a[2] * b[1],
                               a[2] * b[0] - a[0] * b[2],
                               a[0] * b[1] - a[1] * b[0]);
      if (c.norm() > best_norm) {
        best_norm = c.norm();
        best = c;
      }
    }
    if (best_norm <= 1e-12 * anorm * anorm) {
      // Repeated eigenvalue or rank deficiency: fall back to the smallest
      // singular direction.
      Eigen::JacobiSVD<Eigen::Matrix3cd> svd(M, Eigen::ComputeFullV);
      best = svd.matrixV().col(2);
    }
    out.vectors[k] = best.normalized();
  }
  return out;
}

}  // namespace opiexit::model
