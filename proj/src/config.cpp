#include "cartan/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace cartan {

ConfigError::ConfigError(const std::string& message, int line, int column)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                                        message
                                  : message),
      message_(message),
      line_(line),
      column_(column) {}

namespace {

KeySpec tol_key(const std::string& fallback) { return {"tol", ValueKind::Positive, fallback, "pass threshold"}; }

std::vector<CheckInfo> build_catalog() {
  std::vector<CheckInfo> c;
  c.push_back({"euler_residual",
               "Euler residual and the extended-space equivalence",
               "For steady scenarios evaluates the invariance residual i_v d(alpha) - d(beta) at random\n"
               "points; for fluids this is i_v d(v~) + dE with E = |v|^2/2 + P + Phi, the exterior form of\n"
               "the stationary barotropic Euler equation. On extended space M x R it compares\n"
               "i_xi d(sigma), with sigma = alpha^ + dt ^ beta^ and xi = d/dt + v, against the\n"
               "decomposed residual L_{d/dt} alpha^ + i_v d^alpha^ - d^beta^. The two must vanish together\n"
               "and their spatial parts must agree (ratio test).",
               false,
               false,
               {{"points", ValueKind::Count, "50", "spatial sample points (steady scenarios)"},
                {"ext_points", ValueKind::Count, "20", "extended sample points for the ratio test"},
                tol_key("1e-5"),
                {"ratio_tol", ValueKind::Positive, "1e-4", "norm below which a residual counts as vanishing"}}});
  c.push_back({"bernoulli",
               "Bernoulli function along streamlines and vortex lines",
               "For steady fluids the Bernoulli function E = |v|^2/2 + P + Phi is constant along streamlines\n"
               "(v.grad E = 0) and along vortex lines (gamma'.grad E = 0), because i_v d(v~) = -dE.\n"
               "When the flow is irrotational, or E is known to be constant, E must not vary at all.\n"
               "Streamlines are integrated with RK4; vortex lines follow the kernel of d(v~).",
               true,
               true,
               {tol_key("1e-6"),
                {"line_tol", ValueKind::Positive, "1e-5", "threshold for gamma'.grad E along vortex lines"},
                {"seeds", ValueKind::Count, "4", "random seeds in addition to the scenario seed"}}});
  c.push_back({"kelvin",
               "Circulation around a material loop (relative integral invariant)",
               "Advects a closed loop c with the flow and integrates alpha over Phi_t(c). When\n"
               "i_v d(alpha) = d(beta), the Lie derivative L_v alpha = d(beta + i_v alpha) is exact, so\n"
               "the loop integral is constant in time: Kelvin's circulation theorem for fluids, the\n"
               "Poincare relative invariant of p dq for Hamiltonian systems. Time-dependent scenarios\n"
               "advect the loop with xi on M x R and integrate sigma. Loops of degree >= 2 are boundaries\n"
               "of parallelotopes. The differential cross-check reports |integral of L_v alpha over c|.",
               false,
               false,
               {{"t_end", ValueKind::Number, "1", "final advection time"},
                {"samples", ValueKind::Count, "11", "number of equally spaced times including 0 and t_end"},
                {"radius", ValueKind::Positive, "", "loop radius (or half edge for cube boundaries)"},
                {"center", ValueKind::Vector, "", "loop center"},
                {"flow_step", ValueKind::Positive, "1e-3", "largest RK4 step of the flow"},
                tol_key("1e-6")}});
  c.push_back({"helmholtz_lines",
               "Vortex lines move with the fluid",
               "Traces the line tangent to ker d(alpha) through a seed, pushes its nodes forward with the\n"
               "flow for time t, and compares with the line traced afresh through the advected seed.\n"
               "Reports the directed Hausdorff distance between the two and the relative residual\n"
               "|i_T d(alpha)| / (|d(alpha)| |T|) of the pushed-forward tangents T. Requires\n"
               "L_v d(alpha) = 0, which is verified at the nodes first.",
               true,
               false,
               {{"t", ValueKind::Number, "0.5", "advection time"},
                {"length", ValueKind::Positive, "1", "arc length of the traced line"},
                {"step", ValueKind::Positive, "5e-3", "arc-length step"},
                {"seed", ValueKind::Vector, "", "seed point"},
                tol_key("1e-4")}});
  c.push_back({"tube_strength",
               "Flux of d(alpha) through two sections of a generalized tube",
               "Builds a transversal section S1 with boundary c1, slides it along a field W lying in\n"
               "ker d(alpha) to S2 = Phi^W_s(S1), and compares the fluxes of d(alpha) through S1 and S2.\n"
               "Since the side of the tube is swept by kernel directions, Stokes' theorem forces the two\n"
               "to agree (Helmholtz tube theorem and its higher-degree form). Scenarios with a\n"
               "closed-form flux also compare against it.",
               true,
               false,
               {{"s", ValueKind::Number, "", "flow parameter along W"},
                {"size", ValueKind::Positive, "", "section radius (degree 2) or edge length"},
                {"center", ValueKind::Vector, "", "section center"},
                {"w_step", ValueKind::Positive, "1e-2", "largest RK4 step along the kernel field W"},
                tol_key("1e-7"),
                {"flux_tol", ValueKind::Positive, "1e-6", "threshold against the closed-form flux"}}});
  c.push_back({"kernel_dims",
               "Dimension of the kernel distribution and its spatial characterization",
               "Computes D = ker(w -> i_w d(alpha)) by SVD at random points, reports the rank of d(alpha),\n"
               "dim D = dim M - rank, and the bound dim D <= dim M - deg d(alpha) for decomposable forms.\n"
               "On M x R it also compares ker(d(sigma)) restricted to dt = 0 with ker(d^alpha^) restricted\n"
               "to dt = 0 through their largest principal angle; for solutions the two coincide.",
               false,
               false,
               {{"points", ValueKind::Count, "20", "sample points"},
                {"expected_dim", ValueKind::Number, "", "required dim D, if given"},
                tol_key("1e-5")}});
  c.push_back({"frobenius",
               "Integrability of the kernel distribution",
               "For a local orthonormal frame w_i of D the brackets [w_i, w_j] must stay in D. Brackets\n"
               "are formed from finite-difference derivatives of the frame and their component\n"
               "orthogonal to D is reported. D = ker d(alpha) is always involutive when the rank is\n"
               "constant, since d(d(alpha)) = 0.",
               false,
               false,
               {{"points", ValueKind::Count, "20", "sample points"}, tol_key("1e-6")}});
  c.push_back({"tube_of_solutions",
               "Cycles encircling one tube of solutions",
               "On M x R the integral of sigma over a cycle c1 equals the integral over any cycle c2\n"
               "obtained by sliding c1 along the trajectories of xi, even with point-dependent durations\n"
               "tau(x): the swept tube has i_xi d(sigma) = 0 on its tangent planes, so the flux of\n"
               "d(sigma) through it vanishes. Reports both the difference of the cycle integrals and the\n"
               "swept flux. This is the Poincare-Cartan integral invariant.",
               false,
               false,
               {{"duration", ValueKind::Expression, "0.7 + 0.5*x1 - 0.3*x2^2",
                 "flow duration tau as an expression in the spatial coordinates and t"},
                {"radius", ValueKind::Positive, "", "cycle radius"},
                {"center", ValueKind::Vector, "", "cycle center"},
                {"flow_step", ValueKind::Positive, "1e-3", "largest RK4 step of the flow"},
                tol_key("1e-6"),
                {"solution_tol", ValueKind::Positive, "1e-6", "admissible |i_xi d(sigma)| / max(1, |d(sigma)|)"}}});
  c.push_back({"surface_advect",
               "Integral surfaces of D are carried by the flow",
               "Grows an integral manifold of D through a seed by composing the flows of a kernel frame,\n"
               "pushes the mesh and its tangents forward with the flow, and measures how well the\n"
               "advected tangents still annihilate d(alpha).",
               true,
               false,
               {{"extent", ValueKind::Positive, "0.5", "parameter range per axis"},
                {"nodes", ValueKind::Count, "11", "nodes per axis"},
                {"t", ValueKind::Number, "0.5", "advection time"},
                {"seed", ValueKind::Vector, "", "seed point"},
                tol_key("1e-5")}});
  return c;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

const KeySpec* find_key(const CheckInfo& info, const std::string& key) {
  for (const auto& k : info.keys)
    if (k.name == key) return &k;
  return nullptr;
}

std::string known_keys(const CheckInfo& info) {
  std::string out;
  for (const auto& k : info.keys) out += (out.empty() ? "" : ", ") + k.name;
  return out;
}

std::uint64_t parse_u64(const std::string& text, int line, int column) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError("expected a non-negative integer, got '" + text + "'", line, column);
  return v;
}

int parse_count(const std::string& text, int line, int column) {
  const std::uint64_t v = parse_u64(text, line, column);
  if (v < 1 || v > 100000) throw ConfigError("count must be between 1 and 100000, got " + text, line, column);
  return static_cast<int>(v);
}

bool parse_flag(const std::string& text, int line, int column) {
  if (text == "true" || text == "yes" || text == "on" || text == "1") return true;
  if (text == "false" || text == "no" || text == "off" || text == "0") return false;
  throw ConfigError("expected true or false, got '" + text + "'", line, column);
}

void validate(const KeySpec& spec, const ConfigValue& v) {
  switch (spec.kind) {
    case ValueKind::Number: parse_number(v.text, v.line, v.column); break;
    case ValueKind::Positive:
      if (!(parse_number(v.text, v.line, v.column) > 0.0))
        throw ConfigError("'" + spec.name + "' must be positive", v.line, v.column);
      break;
    case ValueKind::Count: parse_count(v.text, v.line, v.column); break;
    case ValueKind::Vector: parse_vector(v.text, v.line, v.column); break;
    case ValueKind::Flag: parse_flag(v.text, v.line, v.column); break;
    case ValueKind::Expression:
    case ValueKind::Text:
      if (v.text.empty()) throw ConfigError("'" + spec.name + "' needs a value", v.line, v.column);
      break;
  }
}

struct Line {
  std::string_view text;
  int number;
};

}  // namespace

const std::vector<CheckInfo>& check_catalog() {
  static const std::vector<CheckInfo> c = build_catalog();
  return c;
}

const CheckInfo* find_check(std::string_view name) {
  for (const auto& c : check_catalog())
    if (c.name == name) return &c;
  return nullptr;
}

std::vector<std::string> suggest_checks(std::string_view name, std::size_t count) {
  std::vector<std::pair<std::size_t, std::string>> scored;
  for (const auto& c : check_catalog()) {
    std::size_t dist = edit_distance(name, c.name);
    if (!name.empty() && c.name.find(name) != std::string::npos) dist = 0;
    scored.emplace_back(dist, c.name);
  }
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::string> out;
  for (const auto& [dist, n] : scored) {
    if (out.size() >= count) break;
    if (dist <= std::max<std::size_t>(3, name.size() / 2)) out.push_back(n);
  }
  return out;
}

double parse_number(const std::string& text, int line, int column) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
    throw ConfigError("expected a number, got '" + text + "'", line, column);
  return v;
}

Vector parse_vector(const std::string& text, int line, int column) {
  std::vector<double> xs;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    const std::string piece = trim(std::string_view(text).substr(start, comma - start));
    const std::size_t lead = text.find_first_not_of(" \t", start);
    xs.push_back(parse_number(piece, line, column + static_cast<int>(lead == std::string::npos ? start : lead)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  Vector v(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) v[static_cast<Eigen::Index>(i)] = xs[i];
  return v;
}

RunConfig parse_config(std::string_view text, std::string origin) {
  RunConfig cfg;
  cfg.origin = std::move(origin);
  enum class Section { Top, Scenario, Check } section = Section::Top;
  std::string current_check;
  std::set<std::string> seen_top;
  std::map<std::string, int> section_lines;
  ConfigValue checks_at;

  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++number;
    const std::size_t comment = raw.find_first_of("#;");
    if (comment != std::string_view::npos) raw = raw.substr(0, comment);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const int indent = static_cast<int>(raw.find_first_not_of(" \t")) + 1;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("section header is missing ']'", number, indent + static_cast<int>(line.size()) - 1);
      const std::string inner = trim(std::string_view(line).substr(1, line.size() - 2));
      if (inner == "scenario") {
        if (section_lines.count("scenario")) throw ConfigError("duplicate [scenario] section", number, indent);
        section_lines["scenario"] = number;
        section = Section::Scenario;
        continue;
      }
      if (inner.rfind("check", 0) == 0 && inner.size() > 5 && (inner[5] == ' ' || inner[5] == '\t')) {
        current_check = trim(std::string_view(inner).substr(5));
        const int col = indent + static_cast<int>(line.find(current_check));
        if (!find_check(current_check)) {
          std::string hint;
          for (const auto& s : suggest_checks(current_check)) hint += (hint.empty() ? "" : ", ") + s;
          throw ConfigError("unknown check '" + current_check + "'" + (hint.empty() ? "" : "; did you mean " + hint + "?"),
                            number, col);
        }
        if (section_lines.count("check " + current_check))
          throw ConfigError("duplicate section for check '" + current_check + "'", number, col);
        section_lines["check " + current_check] = number;
        cfg.check_options[current_check];
        section = Section::Check;
        continue;
      }
      throw ConfigError("unknown section [" + inner + "]; expected [scenario] or [check NAME]", number, indent + 1);
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", number, indent);
    const std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    const std::size_t after_eq = raw.find('=') + 1;
    const std::size_t value_off = raw.find_first_not_of(" \t", after_eq);
    int value_col = static_cast<int>((value_off == std::string_view::npos ? after_eq : value_off)) + 1;
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
      ++value_col;
    }
    if (key.empty()) throw ConfigError("missing key before '='", number, indent);
    const ConfigValue cv{value, number, value_col};

    if (section == Section::Scenario) {
      if (cfg.scenario_params.count(key)) throw ConfigError("duplicate key '" + key + "'", number, indent);
      if (value.empty()) throw ConfigError("'" + key + "' needs a value", number, value_col);
      cfg.scenario_params[key] = cv;
      continue;
    }
    if (section == Section::Check) {
      const CheckInfo& info = *find_check(current_check);
      const KeySpec* spec = find_key(info, key);
      if (!spec)
        throw ConfigError("unknown key '" + key + "' for check " + current_check + "; known: " + known_keys(info),
                          number, indent);
      auto& opts = cfg.check_options[current_check];
      if (opts.count(key)) throw ConfigError("duplicate key '" + key + "'", number, indent);
      validate(*spec, cv);
      opts[key] = cv;
      continue;
    }

    if (!seen_top.insert(key).second) throw ConfigError("duplicate key '" + key + "'", number, indent);
    if (key == "scenario") {
      if (value.empty()) throw ConfigError("scenario needs a name", number, value_col);
      cfg.scenario = value;
      cfg.scenario_at = cv;
    } else if (key == "checks") {
      checks_at = cv;
      std::size_t i = 0;
      while (i < value.size()) {
        const std::size_t b = value.find_first_not_of(", \t", i);
        if (b == std::string::npos) break;
        std::size_t e = value.find_first_of(", \t", b);
        if (e == std::string::npos) e = value.size();
        const std::string name = value.substr(b, e - b);
        const int col = value_col + static_cast<int>(b);
        if (!find_check(name)) {
          std::string hint;
          for (const auto& s : suggest_checks(name)) hint += (hint.empty() ? "" : ", ") + s;
          throw ConfigError("unknown check '" + name + "'" + (hint.empty() ? "" : "; did you mean " + hint + "?"),
                            number, col);
        }
        if (std::find(cfg.checks.begin(), cfg.checks.end(), name) != cfg.checks.end())
          throw ConfigError("check '" + name + "' listed twice", number, col);
        cfg.checks.push_back(name);
        cfg.check_at[name] = ConfigValue{name, number, col};
        i = e;
      }
    } else if (key == "seed") {
      cfg.seed = parse_u64(value, number, value_col);
    } else if (key == "tol") {
      const double t = parse_number(value, number, value_col);
      if (!(t > 0.0)) throw ConfigError("tol must be positive", number, value_col);
      cfg.tol = t;
    } else if (key == "quad_order") {
      cfg.quad_order = parse_count(value, number, value_col);
      if (cfg.quad_order > 64) throw ConfigError("quad_order must be at most 64", number, value_col);
    } else if (key == "out") {
      cfg.out = value;
    } else if (key == "parallel") {
      cfg.parallel = parse_flag(value, number, value_col);
    } else {
      throw ConfigError("unknown key '" + key + "'; known: scenario, checks, seed, tol, quad_order, out, parallel",
                        number, indent);
    }
  }

  if (cfg.scenario.empty()) throw ConfigError("missing 'scenario' key", 1, 1);
  if (cfg.checks.empty())
    throw ConfigError("no checks requested", checks_at.line ? checks_at.line : 1, checks_at.line ? checks_at.column : 1);
  for (const auto& [name, opts] : cfg.check_options)
    if (std::find(cfg.checks.begin(), cfg.checks.end(), name) == cfg.checks.end())
      throw ConfigError("section for check '" + name + "' but it is not listed in 'checks'",
                        section_lines["check " + name], 1);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string(), 0, 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

namespace {

const KeySpec& spec_of(const std::string& check, const std::string& key) {
  const CheckInfo* info = find_check(check);
  if (!info) throw ConfigError("unknown check '" + check + "'", 0, 0);
  const KeySpec* spec = find_key(*info, key);
  if (!spec) throw ConfigError("check " + check + " has no option '" + key + "'", 0, 0);
  return *spec;
}

std::optional<ConfigValue> lookup(const RunConfig& cfg, const std::string& check, const std::string& key) {
  const KeySpec& spec = spec_of(check, key);
  const auto it = cfg.check_options.find(check);
  if (it != cfg.check_options.end()) {
    const auto kv = it->second.find(key);
    if (kv != it->second.end()) return kv->second;
  }
  if (spec.fallback.empty()) return std::nullopt;
  return ConfigValue{spec.fallback, 0, 0};
}

}  // namespace

double option_number(const RunConfig& cfg, const std::string& check, const std::string& key) {
  const auto v = lookup(cfg, check, key);
  if (!v) throw ConfigError("check " + check + ": option '" + key + "' has no default", 0, 0);
  return parse_number(v->text, v->line, v->column);
}

int option_count(const RunConfig& cfg, const std::string& check, const std::string& key) {
  const auto v = lookup(cfg, check, key);
  if (!v) throw ConfigError("check " + check + ": option '" + key + "' has no default", 0, 0);
  return parse_count(v->text, v->line, v->column);
}

std::optional<Vector> option_vector(const RunConfig& cfg, const std::string& check, const std::string& key) {
  const auto v = lookup(cfg, check, key);
  if (!v) return std::nullopt;
  return parse_vector(v->text, v->line, v->column);
}

std::string option_text(const RunConfig& cfg, const std::string& check, const std::string& key) {
  const auto v = lookup(cfg, check, key);
  return v ? v->text : std::string();
}

ConfigValue option_source(const RunConfig& cfg, const std::string& check, const std::string& key) {
  spec_of(check, key);
  const auto it = cfg.check_options.find(check);
  if (it != cfg.check_options.end()) {
    const auto kv = it->second.find(key);
    if (kv != it->second.end()) return kv->second;
  }
  return {};
}

double check_tolerance(const RunConfig& cfg, const std::string& check) {
  if (cfg.tol) return *cfg.tol;
  return option_number(cfg, check, "tol");
}

}  // namespace cartan
