#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "opiexit/commands.hpp"
#include "opiexit/svg.hpp"

namespace {

int run(int argc, char** argv) {
  namespace oc = opiexit::cli;

  CLI::App app{
      "Exit-time and feedback-control toolkit for a noise-perturbed "
      "prescription-opioid compartmental model"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_flag;
  std::uint64_t seed_flag = 0;
  auto* opt_config =
      app.add_option("--config", config_path, "INI config file");
  auto* opt_out = app.add_option("--out", out_flag, "output directory");
  auto* opt_seed =
      app.add_option("--seed", seed_flag, "override the config seed");

  auto* sub_equilibrium = app.add_subcommand(
      "equilibrium", "addiction-free steady state and reproduction number");
  auto* sub_linearize =
      app.add_subcommand("linearize", "Jacobian at the steady state");
  bool identity = false;
  sub_linearize->add_flag("--identity", identity,
                          "use the 3x3 identity instead of the model "
                          "Jacobian (plumbing check)");
  auto* sub_riccati =
      app.add_subcommand("riccati", "residence-time feedback gain synthesis");
  auto* sub_simulate =
      app.add_subcommand("simulate", "one Euler-Maruyama trajectory");
  auto* sub_exitstats = app.add_subcommand(
      "exitstats", "first-exit ensemble, survival curve, rate fit");
  auto* sub_quasipotential = app.add_subcommand(
      "quasipotential", "small-noise exit cost over the domain boundary");
  auto* sub_eigenrate = app.add_subcommand(
      "eigenrate", "principal eigenvalue of the exit generator");

  auto* sub_plot = app.add_subcommand("plot", "render a CSV as an SVG plot");
  std::string plot_input, plot_x = "t", plot_output;
  std::vector<std::string> plot_y;
  sub_plot->add_option("--input", plot_input, "CSV file to plot")->required();
  sub_plot->add_option("--x", plot_x, "x column name");
  sub_plot->add_option("--y", plot_y, "y column names")->required();
  sub_plot->add_option("--output", plot_output,
                       "SVG path (default <out>/plot.svg)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    oc::RunConfig cfg;
    if (opt_config->count() > 0)
      cfg = oc::parse_config_file(config_path);
    else
      oc::validate(cfg);
    if (opt_seed->count() > 0) cfg.sde.seed = seed_flag;
    const std::string out =
        opt_out->count() > 0 ? out_flag : cfg.out_dir;

    if (sub_equilibrium->parsed()) {
      oc::cmd_equilibrium(cfg, out);
    } else if (sub_linearize->parsed()) {
      oc::cmd_linearize(cfg, out, identity);
    } else if (sub_riccati->parsed()) {
      oc::cmd_riccati(cfg, out);
    } else if (sub_simulate->parsed()) {
      oc::cmd_simulate(cfg, out);
    } else if (sub_exitstats->parsed()) {
      oc::cmd_exitstats(cfg, out);
    } else if (sub_quasipotential->parsed()) {
      oc::cmd_quasipotential(cfg, out);
    } else if (sub_eigenrate->parsed()) {
      oc::cmd_eigenrate(cfg, out);
    } else if (sub_plot->parsed()) {
      if (plot_output.empty()) plot_output = out + "/plot.svg";
      oc::emit_svg_lineplot(plot_input, plot_x, plot_y, plot_output);
    }
    return 0;
  } catch (const opiexit::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const opiexit::ComputationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
