#include "opiexit/config.hpp"

#include <cctype>
#include <cerrno>
#include <climits>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "opiexit/fdeigen.hpp"

namespace opiexit::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void fail(const std::string& origin, std::size_t line,
                       const std::string& what) {
  std::ostringstream msg;
  msg << origin << ":" << line << ": " << what;
  throw ValidationError(msg.str());
}

double to_double(const std::string& v, const std::string& origin,
                 std::size_t line, const std::string& key) {
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || v.empty() || errno == ERANGE)
    fail(origin, line, "key '" + key + "': '" + v + "' is not a number");
  return x;
}

std::uint64_t to_uint(const std::string& v, const std::string& origin,
                      std::size_t line, const std::string& key) {
  errno = 0;
  char* end = nullptr;
  if (v.empty() || v[0] == '-')
    fail(origin, line, "key '" + key + "': '" + v + "' is not a nonnegative integer");
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || errno == ERANGE)
    fail(origin, line, "key '" + key + "': '" + v + "' is not a nonnegative integer");
  return static_cast<std::uint64_t>(x);
}

int to_int(const std::string& v, const std::string& origin, std::size_t line,
           const std::string& key) {
  errno = 0;
  char* end = nullptr;
  const long x = std::strtol(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || v.empty() || errno == ERANGE ||
      x < INT_MIN || x > INT_MAX)
    fail(origin, line, "key '" + key + "': '" + v + "' is not an integer");
  return static_cast<int>(x);
}

bool to_bool(const std::string& v, const std::string& origin, std::size_t line,
             const std::string& key) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  fail(origin, line, "key '" + key + "': '" + v + "' is not a boolean");
}

model::Vec3 to_triple(const std::string& v, const std::string& origin,
                      std::size_t line, const std::string& key) {
  std::string s = v;
  for (char& c : s)
    if (c == ',') c = ' ';
  std::istringstream in(s);
  double a, b, c;
  std::string extra;
  if (!(in >> a >> b >> c) || (in >> extra))
    fail(origin, line,
         "key '" + key + "': '" + v + "' is not three numbers");
  return model::Vec3(a, b, c);
}

struct ParsePos {
  const std::string* origin;
  std::size_t line;
};

using Setter = std::function<void(RunConfig&, const std::string&, const ParsePos&)>;

#define NUM_KEY(field)                                              \
  [](RunConfig& c, const std::string& v, const ParsePos& p) {       \
    c.field = to_double(v, *p.origin, p.line, #field);              \
  }

const std::map<std::string, std::map<std::string, Setter>>& schema() {
  static const std::map<std::string, std::map<std::string, Setter>> s = {
      {"epidemic",
       {
           {"alpha", NUM_KEY(epidemic.alpha)},
           {"beta", NUM_KEY(epidemic.beta)},
           {"xi", NUM_KEY(epidemic.xi)},
           {"varepsilon", NUM_KEY(epidemic.varepsilon)},
           {"delta", NUM_KEY(epidemic.delta)},
           {"mu", NUM_KEY(epidemic.mu)},
           {"mu_star", NUM_KEY(epidemic.mu_star)},
           {"gamma", NUM_KEY(epidemic.gamma)},
           {"zeta", NUM_KEY(epidemic.zeta)},
           {"nu", NUM_KEY(epidemic.nu)},
           {"sigma", NUM_KEY(epidemic.sigma)},
       }},
      {"sde",
       {
           {"epsilon_noise", NUM_KEY(sde.epsilon_noise)},
           {"dt", NUM_KEY(sde.dt)},
           {"t_max", NUM_KEY(sde.t_max)},
           {"seed",
            [](RunConfig& c, const std::string& v, const ParsePos& p) {
              c.sde.seed = to_uint(v, *p.origin, p.line, "seed");
            }},
       }},
      {"initial",
       {
           {"x1", NUM_KEY(initial.x1)},
           {"x2", NUM_KEY(initial.x2)},
           {"x3", NUM_KEY(initial.x3)},
       }},
      {"control",
       {
           {"b1", NUM_KEY(control.b1)},
           {"b2", NUM_KEY(control.b2)},
           {"gamma_tilde", NUM_KEY(control.gamma_tilde)},
           {"umax",
            [](RunConfig& c, const std::string& v, const ParsePos& p) {
              c.control.umax = to_double(v, *p.origin, p.line, "umax");
            }},
           {"center",
            [](RunConfig& c, const std::string& v, const ParsePos& p) {
              if (v == "origin")
                c.control.center = CenterMode::origin;
              else if (v == "equilibrium")
                c.control.center = CenterMode::equilibrium;
              else
                fail(*p.origin, p.line,
                     "key 'center': expected origin|equilibrium, got '" + v +
                         "'");
            }},
           {"policy",
            [](RunConfig& c, const std::string& v, const ParsePos& p) {
              if (v == "none")
                c.control.policy = PolicyKind::none;
              else if (v == "linear")
                c.control.policy = PolicyKind::linear;
              else
                fail(*p.origin, p.line,
                     "key 'policy': expected none|linear, got '" + v + "'");
            }},
           {"gains_file",
            [](RunConfig& c, const std::string& v, const ParsePos&) {
              c.control.gains_file = v;
            }},
           {"p_file",
            [](RunConfig& c, const std::string& v, const ParsePos&) {
              c.control.p_file = v;
            }},
           {"norm",
            [](RunConfig& c, const std::string& v, const ParsePos& p) {
              if (v == "spectral")
                c.control.norm = quasipot::NormKind::spectral;
              else if (v == "frobenius")
                c.control.norm = quasipot::NormKind::frobenius;
              else
                fail(*p.origin, p.line,
                     "key 'norm': expected spectral|frobenius, got '" + v +
                         "'");
            }},
       }},
      {"domain",
       {
           {"kind",
            [](RunConfig& c, const std::string& v, const ParsePos& p) {
              using K = exitstats::Domain::Kind;
              if (v == "box")
                c.domain.kind = K::box;
              else if (v == "simplex")
                c.domain.kind = K::simplex;
              else if (v == "intersection")
                c.domain.kind = K::intersection;
              else
                fail(*p.origin, p.line,
                     "key 'kind': expected box|simplex|intersection, got '" +
                         v + "'");
            }},
           {"box_lo",
            [](RunConfig& c, const std::string& v, const ParsePos& p) {
              c.domain.box_lo = to_triple(v, *p.origin, p.line, "box_lo");
            }},
           {"box_hi",
            [](RunConfig& c, const std::string& v, const ParsePos& p) {
              c.domain.box_hi = to_triple(v, *p.origin, p.line, "box_hi");
            }},
           {"margin_x1", NUM_KEY(domain.margin_x1)},
           {"margin_x2", NUM_KEY(domain.margin_x2)},
           {"margin_x3", NUM_KEY(domain.margin_x3)},
           {"margin_z", NUM_KEY(domain.margin_z)},
       }},
      {"ensemble",
       {
           {"n_paths",
            [](RunConfig& c, const std::string& v, const ParsePos& p) {
              c.ensemble.n_paths = to_uint(v, *p.origin, p.line, "n_paths");
            }},
           {"threads",
            [](RunConfig& c, const std::string& v, const ParsePos& p) {
              c.ensemble.threads = to_uint(v, *p.origin, p.line, "threads");
            }},
           {"survival_points",
            [](RunConfig& c, const std::string& v, const ParsePos& p) {
              c.ensemble.survival_points =
                  to_uint(v, *p.origin, p.line, "survival_points");
            }},
           {"t_lo",
            [](RunConfig& c, const std::string& v, const ParsePos& p) {
              c.ensemble.t_lo = to_double(v, *p.origin, p.line, "t_lo");
            }},
           {"t_hi",
            [](RunConfig& c, const std::string& v, const ParsePos& p) {
              c.ensemble.t_hi = to_double(v, *p.origin, p.line, "t_hi");
            }},
       }},
      {"grid",
       {
           {"n1",
            [](RunConfig& c, const std::string& v, const ParsePos& p) {
              c.grid.n1 = to_int(v, *p.origin, p.line, "n1");
            }},
           {"n2",
            [](RunConfig& c, const std::string& v, const ParsePos& p) {
              c.grid.n2 = to_int(v, *p.origin, p.line, "n2");
            }},
           {"n3",
            [](RunConfig& c, const std::string& v, const ParsePos& p) {
              c.grid.n3 = to_int(v, *p.origin, p.line, "n3");
            }},
           {"lo",
            [](RunConfig& c, const std::string& v, const ParsePos& p) {
              c.grid.lo = to_triple(v, *p.origin, p.line, "lo");
            }},
           {"hi",
            [](RunConfig& c, const std::string& v, const ParsePos& p) {
              c.grid.hi = to_triple(v, *p.origin, p.line, "hi");
            }},
           {"dynamics",
            [](RunConfig& c, const std::string& v, const ParsePos& p) {
              if (v == "linear")
                c.grid.dynamics = DynamicsKind::linear;
              else if (v == "nonlinear")
                c.grid.dynamics = DynamicsKind::nonlinear;
              else
                fail(*p.origin, p.line,
                     "key 'dynamics': expected linear|nonlinear, got '" + v +
                         "'");
            }},
           {"write_psi",
            [](RunConfig& c, const std::string& v, const ParsePos& p) {
              c.grid.write_psi = to_bool(v, *p.origin, p.line, "write_psi");
            }},
       }},
      {"output",
       {
           {"dir",
            [](RunConfig& c, const std::string& v, const ParsePos&) {
              c.out_dir = v;
            }},
       }},
  };
  return s;
}

#undef NUM_KEY

}  // namespace

RunConfig parse_config_text(const std::string& text,
                            const std::string& origin) {
  RunConfig cfg;
  const auto& sch = schema();
  const std::map<std::string, Setter>* section = nullptr;
  std::string section_name;

  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        fail(origin, lineno, "malformed section header '" + line + "'");
      section_name = trim(line.substr(1, line.size() - 2));
      const auto it = sch.find(section_name);
      if (it == sch.end())
        fail(origin, lineno, "unknown section [" + section_name + "]");
      section = &it->second;
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(origin, lineno, "expected key = value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(origin, lineno, "empty key");
    if (!section)
      fail(origin, lineno,
           "key '" + key + "' appears before any [section] header");
    const auto it = section->find(key);
    if (it == section->end())
      fail(origin, lineno,
           "unknown key '" + key + "' in section [" + section_name + "]");
    it->second(cfg, value, ParsePos{&origin, lineno});
  }

  validate(cfg);
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

void validate(const RunConfig& cfg) {
  model::validate(cfg.epidemic);
  sde::validate(cfg.sde);

  if (!(cfg.control.b1 >= 0.0) || !(cfg.control.b2 >= 0.0))
    throw ValidationError("control.b1 and control.b2 must be nonnegative");
  if (!(cfg.control.gamma_tilde > 0.0))
    throw ValidationError("control.gamma_tilde must be positive");
  if (cfg.control.umax && !(*cfg.control.umax > 0.0))
    throw ValidationError("control.umax must be positive when set");

  const model::PopulationState s0 = cfg.initial.state();
  if (!s0.in_physical_simplex())
    throw ValidationError(
        "initial.x1/x2/x3 must lie in the population simplex "
        "(all fractions and their sum in [0, 1])");

  make_domain(cfg.domain);  // throws with the offending key's meaning

  if (cfg.ensemble.n_paths < 1)
    throw ValidationError("ensemble.n_paths must be at least 1");
  if (cfg.ensemble.survival_points < 2)
    throw ValidationError("ensemble.survival_points must be at least 2");
  if (cfg.ensemble.t_lo || cfg.ensemble.t_hi) {
    if (!(cfg.ensemble.t_lo && cfg.ensemble.t_hi))
      throw ValidationError(
          "ensemble.t_lo and ensemble.t_hi must be given together");
    if (!(*cfg.ensemble.t_lo >= 0.0) ||
        !(*cfg.ensemble.t_lo < *cfg.ensemble.t_hi) ||
        !(*cfg.ensemble.t_hi <= cfg.sde.t_max))
      throw ValidationError(
          "ensemble fit window needs 0 <= t_lo < t_hi <= sde.t_max");
  }

  fdeigen::GridSpec g;
  g.lo = cfg.grid.lo;
  g.hi = cfg.grid.hi;
  g.n = {cfg.grid.n1, cfg.grid.n2, cfg.grid.n3};
  fdeigen::validate(g);

  if (cfg.out_dir.empty())
    throw ValidationError("output.dir must not be empty");
}

exitstats::Domain make_domain(const DomainConfig& d) {
  using K = exitstats::Domain::Kind;
  switch (d.kind) {
    case K::box:
      return exitstats::Domain::box(d.box_lo, d.box_hi);
    case K::simplex:
      return exitstats::Domain::simplex(d.margin_x1, d.margin_x2, d.margin_x3,
                                        d.margin_z);
    case K::intersection:
      return exitstats::Domain::intersection(
          exitstats::Domain::box(d.box_lo, d.box_hi),
          exitstats::Domain::simplex(d.margin_x1, d.margin_x2, d.margin_x3,
                                     d.margin_z));
  }
  throw ValidationError("domain.kind is not a known value");
}

}  // namespace opiexit::cli
