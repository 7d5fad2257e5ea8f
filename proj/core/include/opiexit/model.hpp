#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>

#include "opiexit/common.hpp"

namespace opiexit::model {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// The eleven flow rates of the compartmental model. All are per unit time
// except beta and xi, which are dimensionless.
struct EpidemicParams {
  double alpha;       // prescription rate
  double beta;        // addiction probability outside the prescription pathway
  double xi;          // fraction of beta acting through leftover prescriptions
  double varepsilon;  // prescription-user return-to-susceptible rate
  double delta;       // post-treatment return-to-susceptible rate
  double mu;          // natural death rate
  double mu_star;     // addict death rate (natural + overdose), >= mu
  double gamma;       // prescribed-user addiction rate
  double zeta;        // treatment entry rate
  double nu;          // relapse rate
  double sigma;       // treatment dropout rate
};

// Literature values. The interval-valued rates are fixed at varepsilon = 3,
// zeta = 0.25.
EpidemicParams default_params();

// default_params() with the addiction inflows gamma and xi set to zero, the
// regime in which the addiction-free equilibrium and its linearization are
// defined.
EpidemicParams addiction_free_params();

// Throws ValidationError naming the offending field.
void validate(const EpidemicParams& p);

// Compartment fractions. The prescription-user fraction z is always derived,
// never stored, so x1 + x2 + x3 + z == 1 holds identically.
struct PopulationState {
  double x1;  // susceptible
  double x2;  // addicted
  double x3;  // recovered / in treatment
  double z() const { return 1.0 - x1 - x2 - x3; }
  // Closed physical simplex: x_i >= 0 and x1+x2+x3 <= 1. Checked on
  // user-supplied initial conditions only; simulated trajectories may leave
  // it, and that excursion is exactly what exit detection observes.
  bool in_physical_simplex() const {
    return x1 >= 0.0 && x2 >= 0.0 && x3 >= 0.0 && x1 + x2 + x3 <= 1.0;
  }
  Vec3 vec() const { return Vec3(x1, x2, x3); }
};

inline PopulationState to_state(const Vec3& v) { return {v[0], v[1], v[2]}; }

struct LinearModel {
  PopulationState equilibrium;
  Mat3 A;  // Jacobian of the drift at `equilibrium`
};

// Time derivative (f1, f2, f3) of the compartment fractions.
Vec3 drift(const PopulationState& s, const EpidemicParams& p);

// Requires gamma == 0, xi == 0 and alpha + varepsilon + mu > 0; throws
// ValidationError otherwise.
PopulationState addiction_free_equilibrium(const EpidemicParams& p);

// Analytic partial derivatives of drift() with respect to (x1, x2, x3).
Mat3 jacobian(const PopulationState& s, const EpidemicParams& p);

// Equilibrium plus Jacobian in one call (same preconditions as
// addiction_free_equilibrium).
LinearModel linearize_addiction_free(const EpidemicParams& p);

// Basic reproduction number from the next-generation construction on the
// (x2, x3) subsystem:
//   R0 = beta * x1star * (delta+sigma+mu) /
//        ((zeta+mu_star)*(delta+sigma+mu) - sigma*zeta).
// Requires gamma == 0, xi == 0 and a positive denominator.
double reproduction_number(const EpidemicParams& p);

// Roots of the characteristic cubic, ascending by real part (ties broken by
// imaginary part). Closed-form solve with one Newton polish per root.
std::array<std::complex<double>, 3> eigenvalues_3x3(const Mat3& A);

struct EigenPairs3 {
  std::array<std::complex<double>, 3> values;
  std::array<Eigen::Vector3cd, 3> vectors;  // unit norm
};

// Eigenvalues plus eigenvectors; each pair satisfies
// |A v - lambda v| <= 1e-8 * |A|.
EigenPairs3 eigenpairs_3x3(const Mat3& A);

}  // namespace opiexit::model
