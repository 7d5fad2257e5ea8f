#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "opiexit/domain.hpp"
#include "opiexit/model.hpp"
#include "opiexit/quasipotential.hpp"
#include "opiexit/sde.hpp"

namespace opiexit::cli {

enum class CenterMode { origin, equilibrium };
enum class PolicyKind { none, linear };
enum class DynamicsKind { linear, nonlinear };

struct ControlConfig {
  double b1 = 0.01;
  double b2 = 0.001;
  double gamma_tilde = 0.001;
  std::optional<double> umax;
  CenterMode center = CenterMode::origin;
  PolicyKind policy = PolicyKind::none;
  std::string gains_file;  // 2x3 CSV; empty = solve the Riccati equation
  std::string p_file;      // 3x3 CSV cost matrix; empty = solve for it
  quasipot::NormKind norm = quasipot::NormKind::spectral;
};

struct DomainConfig {
  exitstats::Domain::Kind kind = exitstats::Domain::Kind::simplex;
  model::Vec3 box_lo = model::Vec3(0.0, 0.0, 0.0);
  model::Vec3 box_hi = model::Vec3(1.0, 1.0, 1.0);
  double margin_x1 = 0.0, margin_x2 = 0.0, margin_x3 = 0.0, margin_z = 0.0;
};

struct EnsembleConfig {
  std::size_t n_paths = 1000;
  std::size_t threads = 0;  // 0 = hardware concurrency
  std::size_t survival_points = 512;
  std::optional<double> t_lo, t_hi;  // fit window; unset = automatic
};

struct GridConfig {
  int n1 = 33, n2 = 33, n3 = 33;
  model::Vec3 lo = model::Vec3(-0.05, -0.05, -0.05);
  model::Vec3 hi = model::Vec3(0.05, 0.05, 0.05);
  DynamicsKind dynamics = DynamicsKind::linear;
  bool write_psi = false;
};

struct InitialConfig {
  double x1 = 0.1185, x2 = 0.5015, x3 = 0.16;
  model::PopulationState state() const { return {x1, x2, x3}; }
};

struct RunConfig {
  model::EpidemicParams epidemic = model::addiction_free_params();
  sde::SdeConfig sde;
  InitialConfig initial;
  ControlConfig control;
  DomainConfig domain;
  EnsembleConfig ensemble;
  GridConfig grid;
  std::string out_dir = ".";
};

// INI-style sections ([epidemic], [sde], [initial], [control], [domain],
// [ensemble], [grid], [output]) with key = value lines, '#'/';' comments.
// Unknown sections or keys throw ValidationError naming them; every block is
// validated against its owning module's invariants before returning.
RunConfig parse_config_text(const std::string& text,
                            const std::string& origin = "<config>");
RunConfig parse_config_file(const std::string& path);

void validate(const RunConfig& cfg);

exitstats::Domain make_domain(const DomainConfig& d);

}  // namespace opiexit::cli
