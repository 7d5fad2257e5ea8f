#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "opiexit/config.hpp"
#include "opiexit/csv.hpp"
#include "opiexit/svg.hpp"
#include "oracles.hpp"

using namespace opiexit;
using cli::CsvTable;
using cli::RunConfig;

namespace {

std::string error_text(const std::string& text) {
  return oracles::message_of<ValidationError>(
      [&] { cli::parse_config_text(text); });
}

std::size_t count_occurrences(const std::string& hay,
                              const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = hay.find(needle); pos != std::string::npos;
       pos = hay.find(needle, pos + needle.size()))
    ++n;
  return n;
}

}  // namespace

TEST_CASE("config: empty text yields the documented defaults") {
  const RunConfig c = cli::parse_config_text("");
  CHECK(c.epidemic.alpha == 0.15);
  CHECK(c.epidemic.gamma == 0.0);  // addiction-free regime by default
  CHECK(c.epidemic.xi == 0.0);
  CHECK(c.epidemic.varepsilon == 3.0);
  CHECK(c.sde.epsilon_noise == 0.01);
  CHECK(c.sde.dt == 0.01);
  CHECK(c.sde.t_max == 1000.0);
  CHECK(c.sde.seed == 1);
  CHECK(c.initial.x1 == 0.1185);
  CHECK(c.initial.x2 == 0.5015);
  CHECK(c.initial.x3 == 0.16);
  CHECK(c.control.b1 == 0.01);
  CHECK(c.control.b2 == 0.001);
  CHECK(c.control.gamma_tilde == 0.001);
  CHECK(!c.control.umax);
  CHECK(c.control.center == cli::CenterMode::origin);
  CHECK(c.control.policy == cli::PolicyKind::none);
  CHECK(c.control.norm == quasipot::NormKind::spectral);
  CHECK(c.domain.kind == exitstats::Domain::Kind::simplex);
  CHECK(c.ensemble.n_paths == 1000);
  CHECK(c.ensemble.survival_points == 512);
  CHECK(!c.ensemble.t_lo);
  CHECK(c.grid.n1 == 33);
  CHECK(c.grid.lo[0] == -0.05);
  CHECK(c.grid.dynamics == cli::DynamicsKind::linear);
  CHECK(!c.grid.write_psi);
  CHECK(c.out_dir == ".");
}

TEST_CASE("config: every key round-trips") {
  const std::string text = R"(# full configuration
[epidemic]
alpha = 0.2
beta = 0.004
; comments sit on their own lines; values never carry trailing notes
xi = 0
varepsilon = 2.5
delta = 0.09
mu = 0.007
mu_star = 0.012
gamma = 0
zeta = 0.3
nu = 0.25
sigma = 0.65

[sde]
epsilon_noise = 0.02
dt = 0.005
t_max = 250
seed = 99

[initial]
x1 = 0.2
x2 = 0.4
x3 = 0.1

[control]
b1 = 0.02
b2 = 0.002
gamma_tilde = 0.01
umax = 0.5
center = equilibrium
policy = linear
gains_file = gains.csv
p_file = P.csv
norm = frobenius

[domain]
kind = intersection
box_lo = -1, -1, -1
box_hi = 1 1 1
margin_x1 = 0.01
margin_x2 = 0.02
margin_x3 = 0.03
margin_z = 0.04

[ensemble]
n_paths = 77
threads = 2
survival_points = 64
t_lo = 1.5
t_hi = 20

[grid]
n1 = 17
n2 = 9
n3 = 5
lo = -0.1 -0.2 -0.3
hi = 0.1, 0.2, 0.3
dynamics = nonlinear
write_psi = yes

[output]
dir = results
)";
  const RunConfig c = cli::parse_config_text(text);
  CHECK(c.epidemic.alpha == 0.2);
  CHECK(c.epidemic.beta == 0.004);
  CHECK(c.epidemic.varepsilon == 2.5);
  CHECK(c.epidemic.mu_star == 0.012);
  CHECK(c.epidemic.zeta == 0.3);
  CHECK(c.sde.epsilon_noise == 0.02);
  CHECK(c.sde.dt == 0.005);
  CHECK(c.sde.t_max == 250.0);
  CHECK(c.sde.seed == 99);
  CHECK(c.initial.x2 == 0.4);
  CHECK(c.control.b1 == 0.02);
  CHECK(c.control.gamma_tilde == 0.01);
  REQUIRE(c.control.umax);
  CHECK(*c.control.umax == 0.5);
  CHECK(c.control.center == cli::CenterMode::equilibrium);
  CHECK(c.control.policy == cli::PolicyKind::linear);
  CHECK(c.control.gains_file == "gains.csv");
  CHECK(c.control.p_file == "P.csv");
  CHECK(c.control.norm == quasipot::NormKind::frobenius);
  CHECK(c.domain.kind == exitstats::Domain::Kind::intersection);
  CHECK(c.domain.box_lo[1] == -1.0);
  CHECK(c.domain.box_hi[2] == 1.0);
  CHECK(c.domain.margin_z == 0.04);
  CHECK(c.ensemble.n_paths == 77);
  CHECK(c.ensemble.threads == 2);
  CHECK(c.ensemble.survival_points == 64);
  REQUIRE(c.ensemble.t_lo);
  CHECK(*c.ensemble.t_lo == 1.5);
  CHECK(*c.ensemble.t_hi == 20.0);
  CHECK(c.grid.n1 == 17);
  CHECK(c.grid.n3 == 5);
  CHECK(c.grid.lo[2] == -0.3);
  CHECK(c.grid.hi[1] == 0.2);
  CHECK(c.grid.dynamics == cli::DynamicsKind::nonlinear);
  CHECK(c.grid.write_psi);
  CHECK(c.out_dir == "results");

  // CRLF and padded section headers parse the same way.
  const RunConfig c2 =
      cli::parse_config_text("[ sde ]\r\nseed = 7\r\n");
  CHECK(c2.sde.seed == 7);
}

TEST_CASE("config: unknown names are rejected with their location") {
  const std::string e1 = error_text("[epidemic]\nalphaa = 0.1\n");
  CHECK(oracles::contains(e1, "alphaa"));
  CHECK(oracles::contains(e1, "[epidemic]"));
  CHECK(oracles::contains(e1, "<config>:2:"));

  CHECK(oracles::contains(error_text("[nonsense]\n"), "unknown section"));
  CHECK(oracles::contains(error_text("alpha = 0.1\n"),
                          "before any [section]"));
  CHECK(oracles::contains(error_text("[epidemic\nalpha = 0.1\n"),
                          "malformed section header"));
  CHECK(oracles::contains(error_text("[sde]\n\ndt\n"), "<config>:3:"));
  CHECK(oracles::contains(error_text("[sde]\n= 3\n"), "empty key"));
}

TEST_CASE("config: values must parse as their declared type") {
  CHECK(oracles::contains(error_text("[epidemic]\nalpha = abc\n"),
                          "not a number"));
  CHECK(oracles::contains(error_text("[sde]\nseed = -5\n"),
                          "not a nonnegative integer"));
  CHECK(oracles::contains(error_text("[grid]\nn1 = 1e2\n"),
                          "not an integer"));
  CHECK(oracles::contains(error_text("[grid]\nwrite_psi = maybe\n"),
                          "not a boolean"));
  CHECK(oracles::contains(error_text("[domain]\nbox_lo = 1 2\n"),
                          "not three numbers"));
  CHECK(oracles::contains(error_text("[domain]\nbox_lo = 1 2 3 4\n"),
                          "not three numbers"));
  CHECK(oracles::contains(error_text("[control]\npolicy = sometimes\n"),
                          "none|linear"));
  CHECK(oracles::contains(error_text("[control]\nnorm = nuclear\n"),
                          "spectral|frobenius"));
  CHECK(oracles::contains(error_text("[control]\ncenter = elsewhere\n"),
                          "origin|equilibrium"));
  CHECK(oracles::contains(error_text("[domain]\nkind = ball\n"),
                          "box|simplex|intersection"));
  CHECK(oracles::contains(error_text("[grid]\ndynamics = chaotic\n"),
                          "linear|nonlinear"));
}

TEST_CASE("config: cross-field validation happens after parsing") {
  CHECK_THROWS_AS(cli::parse_config_text("[epidemic]\nxi = 1.5\n"),
                  ValidationError);
  CHECK_THROWS_AS(
      cli::parse_config_text("[epidemic]\nmu = 0.02\nmu_star = 0.01\n"),
      ValidationError);
  CHECK_THROWS_AS(cli::parse_config_text("[sde]\ndt = 0\n"), ValidationError);
  CHECK_THROWS_AS(cli::parse_config_text("[sde]\nepsilon_noise = -1\n"),
                  ValidationError);
  CHECK_THROWS_AS(cli::parse_config_text("[ensemble]\nn_paths = 0\n"),
                  ValidationError);
  CHECK_THROWS_AS(cli::parse_config_text("[ensemble]\nsurvival_points = 1\n"),
                  ValidationError);
  CHECK(oracles::contains(error_text("[ensemble]\nt_lo = 1\n"),
                          "given together"));
  CHECK_THROWS_AS(
      cli::parse_config_text("[ensemble]\nt_lo = 5\nt_hi = 2\n"),
      ValidationError);
  CHECK_THROWS_AS(
      cli::parse_config_text("[ensemble]\nt_lo = 1\nt_hi = 1e9\n"),
      ValidationError);
  CHECK_THROWS_AS(cli::parse_config_text("[grid]\nn1 = 2\n"),
                  ValidationError);
  CHECK_THROWS_AS(
      cli::parse_config_text("[domain]\nkind = box\nbox_hi = 0 0 0\n"),
      ValidationError);
  CHECK_THROWS_AS(
      cli::parse_config_text("[domain]\nmargin_x1 = 0.5\nmargin_x2 = 0.6\n"),
      ValidationError);
  CHECK(oracles::contains(error_text("[control]\ngamma_tilde = 0\n"),
                          "gamma_tilde"));
  CHECK(oracles::contains(error_text("[control]\numax = 0\n"), "umax"));
  CHECK_THROWS_AS(cli::parse_config_text("[control]\nb1 = -1\n"),
                  ValidationError);
  CHECK(oracles::contains(
      error_text("[initial]\nx1 = 0.9\nx2 = 0.5\nx3 = 0\n"), "simplex"));
  CHECK(oracles::contains(error_text("[output]\ndir =\n"), "output.dir"));
}

TEST_CASE("config: file loading reports the path") {
  const std::string msg = oracles::message_of<ValidationError>(
      [] { cli::parse_config_file("/no/such/config.ini"); });
  CHECK(oracles::contains(msg, "cannot open config file"));
  CHECK(oracles::contains(msg, "/no/such/config.ini"));

  const std::string dir = oracles::fresh_dir("config_file");
  const std::string path = dir + "/run.ini";
  std::ofstream(path) << "[sde]\nseed = 42\n";
  CHECK(cli::parse_config_file(path).sde.seed == 42);
  // Errors carry file:line origins.
  std::ofstream(path) << "[sde]\ndt = soon\n";
  const std::string msg2 = oracles::message_of<ValidationError>(
      [&] { cli::parse_config_file(path); });
  CHECK(oracles::contains(msg2, path + ":2:"));
}

TEST_CASE("config: make_domain produces the requested facet structure") {
  cli::DomainConfig d;
  CHECK(cli::make_domain(d).facets().size() == 4);  // simplex default
  d.kind = exitstats::Domain::Kind::box;
  CHECK(cli::make_domain(d).facets().size() == 6);
  d.kind = exitstats::Domain::Kind::intersection;
  CHECK(cli::make_domain(d).facets().size() == 10);
}

TEST_CASE("csv: shortest round-trip representation preserves bits") {
  const double values[] = {1.0 / 3.0,           0.1,
                           1e-17,               1e308,
                           -0.0,                12345678.901234567,
                           -2.5e-7};
  for (double v : values) {
    const double back = cli::parse_double(cli::fmt17(v), "probe");
    CHECK(std::memcmp(&back, &v, sizeof v) == 0);
  }
  CHECK(std::signbit(cli::parse_double(cli::fmt17(-0.0), "probe")));

  const std::string msg = oracles::message_of<ValidationError>(
      [] { cli::parse_double("12x", "the rate"); });
  CHECK(oracles::contains(msg, "the rate"));
  CHECK(oracles::contains(msg, "12x"));
  CHECK(cli::parse_int("-42", "n") == -42);
  CHECK_THROWS_AS(cli::parse_int("4.5", "n"), ValidationError);
}

TEST_CASE("csv: tables survive write and read") {
  CsvTable t;
  t.header = {"a", "b", "c"};
  t.rows = {{"1", "2.5", "x"}, {"4", "", "z"}, {"7", "8", ""}};
  const std::string dir = oracles::fresh_dir("csv_roundtrip");
  const std::string path = dir + "/t.csv";
  cli::write_csv(path, t);
  CHECK(!std::filesystem::exists(path + ".tmp"));

  const CsvTable u = cli::read_csv(path);
  REQUIRE(u.header == t.header);
  REQUIRE(u.rows.size() == t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) CHECK(u.rows[i] == t.rows[i]);

  CHECK(cli::column_index(u, "b") == 1);
  const std::string msg = oracles::message_of<ValidationError>(
      [&] { cli::column_index(u, "missing"); });
  CHECK(oracles::contains(msg, "missing"));

  std::ofstream(dir + "/empty.csv");
  CHECK_THROWS_AS(cli::read_csv(dir + "/empty.csv"), ValidationError);
  CHECK_THROWS_AS(cli::read_csv(dir + "/nonexistent.csv"), ValidationError);
}

TEST_CASE("svg: one polyline per series, deterministic bytes") {
  CsvTable t;
  t.header = {"t", "x1", "x2", "x3", "z"};
  t.rows = {{"0", "0.1", "0.5", "0.2", "0.2"},
            {"1", "0.2", "0.4", "0.2", "0.2"},
            {"2", "0.3", "0.3", "0.2", "0.2"}};
  const std::string one = cli::render_svg_lineplot(t, "t", {"x1"});
  CHECK(count_occurrences(one, "<polyline") == 1);
  CHECK(oracles::contains(one, "<svg"));
  CHECK(oracles::contains(one, "</svg>"));

  const std::string four =
      cli::render_svg_lineplot(t, "t", {"x1", "x2", "x3", "z"});
  CHECK(count_occurrences(four, "<polyline") == 4);
  // x3 is constant; the padded scale still renders it.
  CHECK(cli::render_svg_lineplot(t, "t", {"x3"}) ==
        cli::render_svg_lineplot(t, "t", {"x3"}));
  CHECK(four == cli::render_svg_lineplot(t, "t", {"x1", "x2", "x3", "z"}));

  const std::string msg = oracles::message_of<ValidationError>(
      [&] { cli::render_svg_lineplot(t, "t", {"nope"}); });
  CHECK(oracles::contains(msg, "nope"));

  CsvTable bad = t;
  bad.rows[1][1] = "fast";
  CHECK_THROWS_AS(cli::render_svg_lineplot(bad, "t", {"x1"}),
                  ValidationError);
  CsvTable ragged = t;
  ragged.rows[2].pop_back();
  CHECK_THROWS_AS(cli::render_svg_lineplot(ragged, "t", {"z"}),
                  ValidationError);
  CHECK_THROWS_AS(cli::render_svg_lineplot(t, "t", {}), ValidationError);

  // File-level wrapper plumbs through the same renderer.
  const std::string dir = oracles::fresh_dir("svg_emit");
  cli::write_csv(dir + "/d.csv", t);
  cli::emit_svg_lineplot(dir + "/d.csv", "t", {"x1", "x2"}, dir + "/p.svg");
  CHECK(oracles::read_file(dir + "/p.svg") ==
        cli::render_svg_lineplot(t, "t", {"x1", "x2"}));
}
