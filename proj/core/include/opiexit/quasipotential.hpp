#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "opiexit/domain.hpp"
#include "opiexit/exitstats.hpp"
#include "opiexit/model.hpp"
#include "opiexit/sde.hpp"

namespace opiexit::quasipot {

using model::Mat3;
using model::Vec3;

enum class NormKind { spectral, frobenius };

const char* norm_kind_name(NormKind k);

struct QuasipotentialResult {
  double phi;
  Vec3 minimizer;          // on the closed boundary of the domain
  int facet;               // index into Domain::facets()
  std::string facet_name;
  NormKind norm_kind;
};

// Largest absolute eigenvalue of a symmetric matrix.
double matrix_norm_spectral(const Mat3& P);
double matrix_norm(const Mat3& P, NormKind k);

// inf over the domain boundary of (x-center)^T P (x-center) / (2 |P|),
// computed exactly: for every facet, edge and vertex of the boundary
// polytope, solve the equality-constrained stationarity system and keep the
// feasible candidate of least value. Throws ValidationError if P is not
// positive semidefinite or center is not strictly inside d.
QuasipotentialResult quasipotential(const Mat3& P, const exitstats::Domain& d,
                                    const Vec3& center = Vec3::Zero(),
                                    NormKind norm = NormKind::spectral);

struct ScalingRow {
  double eps;
  double mean_exit;
  double eps_ln_mean_exit;
  double phi;  // repeated on every row; it does not depend on eps
  bool censored_dominated;
};

struct ScalingSetup {
  sde::AffineDynamics dyn;  // closed-loop linear drift
  Vec3 x0;
  exitstats::Domain domain;
  double dt_ref;      // step used at eps_ref ...
  double eps_ref;     // ... scaled per row as dt = dt_ref * eps_ref / eps so
                      // the discrete-crossing bias ~ sqrt(eps*dt) is constant
  double t_max;
  std::uint64_t seed;
  std::size_t n_threads = 0;
};

// Tabulates eps * ln(mean exit time) for each eps, against the
// noise-independent phi. eps_list must be decreasing.
std::vector<ScalingRow> log_residence_scaling(double phi,
                                              const ScalingSetup& setup,
                                              const std::vector<double>& eps_list,
                                              std::size_t n_paths);

}  // namespace opiexit::quasipot
