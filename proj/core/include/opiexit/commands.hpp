#pragma once

#include <string>
#include <vector>

#include "opiexit/config.hpp"

namespace opiexit::cli {

// Each command validates its inputs, computes, and writes CSV files into
// out_dir (created if missing). Failures are reported by throwing:
// ValidationError for bad input (CLI exit code 2), ComputationError for
// numerical failure (exit code 1). All writes are atomic (temp + rename).

// equilibrium.csv: x1,x2,x3,z,r0
void cmd_equilibrium(const RunConfig& cfg, const std::string& out_dir);

// jacobian.csv: row,c1,c2,c3 ; eigenvalues.csv: re,im
// debug_identity swaps in the 3x3 identity instead of the model Jacobian
// (a plumbing check: its spectrum is {1,1,1}).
void cmd_linearize(const RunConfig& cfg, const std::string& out_dir,
                   bool debug_identity = false);

// P.csv / K.csv: row,c1,c2,c3 ; riccati_summary.csv: gamma_tilde,residual ;
// closed_loop_eigenvalues.csv: re,im
void cmd_riccati(const RunConfig& cfg, const std::string& out_dir);

// trajectory.csv: t,x1,x2,x3,z (full horizon, no exit stopping)
void cmd_simulate(const RunConfig& cfg, const std::string& out_dir);

// exit_times.csv: path,exit_time,censored ; survival.csv: t,survival ;
// rate.csv: lambda_hat,stderr,t_lo,t_hi,n_points ;
// mean_exit.csv: mean,stderr,n_exited,n_censored,censored_dominated
void cmd_exitstats(const RunConfig& cfg, const std::string& out_dir);

// phi.csv: phi,min_x1,min_x2,min_x3,facet,norm_kind
void cmd_quasipotential(const RunConfig& cfg, const std::string& out_dir);

// lambda.csv: lambda,iterations,residual,n1,n2,n3 ; optionally psi.csv:
// i1,i2,i3,x1,x2,x3,psi
void cmd_eigenrate(const RunConfig& cfg, const std::string& out_dir);

// Reads a 2x3 gain matrix from a K.csv-format file.
Eigen::Matrix<double, 2, 3> load_gain_csv(const std::string& path);

}  // namespace opiexit::cli
