#include "cartan/scenario.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "cartan/flow.hpp"
#include "cartan/kernel.hpp"

namespace cartan {

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Fluid: return "fluid";
    case ScenarioKind::Hamiltonian: return "hamiltonian";
    case ScenarioKind::Abstract: return "abstract";
  }
  return "unknown";
}

Point extended_point(const Point& x, double t) {
  Point p(x.size() + 1);
  p << x, t;
  return p;
}

DifferentialForm build_sigma(const DifferentialForm& alpha_hat, const DifferentialForm& beta_hat) {
  if (!alpha_hat.extended() || !beta_hat.extended())
    throw ScenarioError("build_sigma: both forms must live on extended space");
  if (alpha_hat.dim() != beta_hat.dim()) throw ScenarioError("build_sigma: dimension mismatch");
  if (beta_hat.degree() + 1 != alpha_hat.degree())
    throw ScenarioError("build_sigma: need degrees k and k - 1, got " + std::to_string(alpha_hat.degree()) +
                        " and " + std::to_string(beta_hat.degree()));
  return alpha_hat + wedge(time_differential(alpha_hat.domain()), beta_hat);
}

namespace {

constexpr double kTimeHalfRange = 100.0;

using Velocity = std::function<Vector(const Point&, double)>;
using ScalarFn = std::function<double(const Point&, double)>;
using TensorFn = std::function<AltTensord(const Point&, double)>;

/// Everything a scenario needs, in closed form on M × R.
struct Model {
  std::string name;
  std::string summary;
  ScenarioKind kind = ScenarioKind::Fluid;
  bool steady = true;
  bool solution = true;
  bool constructed = false;
  bool bernoulli_constant = false;
  int n = 3;
  int k = 1;
  double half_width = 10.0;
  std::vector<Exclusion> extended_exclusions;
  Point sample_lo, sample_hi;
  double t_lo = 0.0, t_hi = 1.0;
  Velocity velocity;
  TensorFn alpha;  // ignored for fluids (α = ṽ)
  TensorFn beta;   // ignored for fluids (β = -E)
  ScalarFn pressure;
  ScalarFn potential;
  Point seed;
  SectionSpec section;
  std::function<double(const Point&, double)> section_flux;
  std::map<std::string, double> params;
};

AltTensord embed(const AltTensord& a) {
  const int n = a.dim();
  AltTensord out(n + 1, a.degree());
  if (a.degree() == 0) {
    out.comps()[0] = a.value();
    return out;
  }
  const auto combos = combinations(n, a.degree());
  for (std::size_t i = 0; i < combos.size(); ++i) out[combos[i]] = a.comps()[static_cast<Eigen::Index>(i)];
  return out;
}

AltTensord covector_of(const Vector& v) { return AltTensord::covector(v); }

Scenario assemble(Model m) {
  Scenario s;
  s.name = m.name;
  s.summary = m.summary;
  s.kind = m.kind;
  s.steady = m.steady;
  s.solution = m.solution;
  s.constructed = m.constructed;
  s.bernoulli_constant = m.bernoulli_constant;
  s.spatial_dim = m.n;
  s.degree = m.k;
  s.params = m.params;
  s.domain = Domain(m.n, m.half_width);
  s.extended_domain = s.domain.extended(-kTimeHalfRange, kTimeHalfRange);
  for (auto& e : m.extended_exclusions) s.extended_domain.exclude(e);
  s.sample_lo = m.sample_lo;
  s.sample_hi = m.sample_hi;
  s.t_lo = m.t_lo;
  s.t_hi = m.t_hi;
  s.seed = m.seed;
  s.section = m.section;
  s.section_flux = m.section_flux;

  const int n = m.n;
  const Velocity vel = m.velocity;
  const Domain& ext = s.extended_domain;
  auto spatial = [n](const Point& p) { return Point(p.head(n)); };
  auto time = [n](const Point& p) { return p[n]; };

  if (m.kind == ScenarioKind::Fluid) {
    const ScalarFn pressure = m.pressure ? m.pressure : ScalarFn([](const Point&, double) { return 0.0; });
    const ScalarFn potential = m.potential ? m.potential : ScalarFn([](const Point&, double) { return 0.0; });
    m.alpha = [vel](const Point& x, double t) { return covector_of(vel(x, t)); };
    m.beta = [vel, pressure, potential](const Point& x, double t) {
      const Vector u = vel(x, t);
      return AltTensord::scalar(static_cast<int>(x.size()), -(0.5 * u.squaredNorm() + pressure(x, t) + potential(x, t)));
    };
    auto ext_scalar = [&](ScalarFn f, const std::string& label) {
      return scalar_field(n + 1, true, ext, [f, spatial, time](const Point& p) { return f(spatial(p), time(p)); },
                          label);
    };
    auto bern = [vel, pressure, potential](const Point& x, double t) {
      return 0.5 * vel(x, t).squaredNorm() + pressure(x, t) + potential(x, t);
    };
    s.pressure_hat = ext_scalar(pressure, "p");
    s.potential_hat = ext_scalar(potential, "Phi");
    s.enthalpy_hat = ext_scalar(pressure, "P");
    s.bernoulli_hat = ext_scalar(bern, "E");
    if (m.steady) {
      auto sp_scalar = [&](ScalarFn f, const std::string& label) {
        return scalar_field(n, false, s.domain, [f](const Point& x) { return f(x, 0.0); }, label);
      };
      s.pressure = sp_scalar(pressure, "p");
      s.potential = sp_scalar(potential, "Phi");
      s.enthalpy = sp_scalar(pressure, "P");
      s.bernoulli = sp_scalar(bern, "E");
    }
  }

  const TensorFn alpha = m.alpha, beta = m.beta;
  const int k = m.k;
  s.v_hat = VectorField(
      n + 1, true, ext,
      [vel, spatial, time](const Point& p) {
        const Vector u = vel(spatial(p), time(p));
        Vector out(u.size() + 1);
        out << u, 0.0;
        return out;
      },
      "v(x,t)");
  s.xi = VectorField(
      n + 1, true, ext,
      [vel, spatial, time](const Point& p) {
        const Vector u = vel(spatial(p), time(p));
        Vector out(u.size() + 1);
        out << u, 1.0;
        return out;
      },
      "d/dt + v");
  s.alpha_hat = DifferentialForm(n + 1, k, true, ext,
                                 [alpha, spatial, time](const Point& p) { return embed(alpha(spatial(p), time(p))); },
                                 m.kind == ScenarioKind::Fluid ? "v^" : "alpha^");
  s.beta_hat = DifferentialForm(n + 1, k - 1, true, ext,
                                [beta, spatial, time](const Point& p) { return embed(beta(spatial(p), time(p))); },
                                m.kind == ScenarioKind::Fluid ? "-E" : "beta^");
  s.sigma = build_sigma(s.alpha_hat, s.beta_hat);

  if (m.steady) {
    s.v = VectorField(n, false, s.domain, [vel](const Point& x) { return vel(x, 0.0); }, m.name + ".v");
    s.alpha = DifferentialForm(n, k, false, s.domain, [alpha](const Point& x) { return alpha(x, 0.0); },
                               m.kind == ScenarioKind::Fluid ? "v~" : "alpha");
    s.beta = DifferentialForm(n, k - 1, false, s.domain, [beta](const Point& x) { return beta(x, 0.0); },
                              m.kind == ScenarioKind::Fluid ? "-E" : "beta");
  }
  return s;
}

double param(const std::map<std::string, double>& p, const std::string& key) { return p.at(key); }

Matrix permuted_frame(int n, const std::vector<int>& order) {
  Matrix f = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) f(order[static_cast<std::size_t>(j)], j) = 1.0;
  return f;
}

SectionSpec section(Point center, Matrix frame, double size, double loop, Vector axis, double length) {
  SectionSpec sec;
  sec.center = std::move(center);
  sec.frame = std::move(frame);
  sec.size = size;
  sec.loop_radius = loop;
  sec.axis = std::move(axis);
  sec.tube_length = length;
  return sec;
}

Model rigid_rotation(const std::map<std::string, double>& p, bool gravity) {
  const double om = param(p, "omega");
  const double g = gravity ? param(p, "g") : 0.0;
  Model m;
  m.name = gravity ? "rigid_rotation_gravity" : "rigid_rotation";
  m.summary = gravity ? "solid-body rotation about z in a uniform gravity potential g z"
                      : "solid-body rotation v = omega (-y, x, 0) with p = omega^2 (x^2 + y^2) / 2";
  m.params = p;
  m.velocity = [om](const Point& x, double) { return make_vec({-om * x[1], om * x[0], 0.0}); };
  m.pressure = [om, g](const Point& x, double) { return 0.5 * om * om * (x[0] * x[0] + x[1] * x[1]) - g * x[2]; };
  m.potential = [g](const Point& x, double) { return g * x[2]; };
  m.sample_lo = Point::Constant(3, -2.0);
  m.sample_hi = Point::Constant(3, 2.0);
  m.seed = make_point({1, 0, 0});
  m.section = section(Point::Zero(3), Matrix::Identity(3, 3), 0.5, 1.0, make_vec({0, 0, 1}), 1.0);
  m.section_flux = [om](const Point&, double r) { return 2.0 * om * std::numbers::pi * r * r; };
  return m;
}

Model taylor_green(const std::map<std::string, double>& p) {
  Model m;
  m.name = "taylor_green";
  m.summary = "steady Taylor-Green cell v = (sin x cos y, -cos x sin y, 0), p = (cos 2x + cos 2y) / 4";
  m.params = p;
  m.velocity = [](const Point& x, double) {
    return make_vec({std::sin(x[0]) * std::cos(x[1]), -std::cos(x[0]) * std::sin(x[1]), 0.0});
  };
  m.pressure = [](const Point& x, double) { return 0.25 * (std::cos(2 * x[0]) + std::cos(2 * x[1])); };
  m.sample_lo = Point::Constant(3, -3.0);
  m.sample_hi = Point::Constant(3, 3.0);
  m.seed = make_point({0.5, 0.7, 0.0});
  const double h = std::numbers::pi / 2;
  m.section = section(make_point({h, h, 0}), Matrix::Identity(3, 3), 0.5, 1.0, make_vec({0, 0, 1}), 1.0);
  return m;
}

Model abc(const std::map<std::string, double>& p) {
  const double a = param(p, "A"), b = param(p, "B"), c = param(p, "C");
  Model m;
  m.name = "abc";
  m.summary = "Arnold-Beltrami-Childress flow (curl v = v) with p = 3/2 - |v|^2 / 2";
  m.params = p;
  m.bernoulli_constant = true;
  m.half_width = 20.0;
  m.velocity = [a, b, c](const Point& x, double) {
    return make_vec({a * std::sin(x[2]) + c * std::cos(x[1]), b * std::sin(x[0]) + a * std::cos(x[2]),
                     c * std::sin(x[1]) + b * std::cos(x[0])});
  };
  const auto vel = m.velocity;
  m.pressure = [vel](const Point& x, double t) { return 1.5 - 0.5 * vel(x, t).squaredNorm(); };
  m.sample_lo = Point::Constant(3, -std::numbers::pi);
  m.sample_hi = Point::Constant(3, std::numbers::pi);
  m.seed = make_point({0.4, -0.3, 1.1});
  const Point center = make_point({0.3, -0.2, 0.5});
  m.section = section(center, Matrix::Identity(3, 3), 0.5, 1.0, vel(center, 0.0), 0.5);
  return m;
}

Model uniform(const std::map<std::string, double>& p) {
  const Vector u = make_vec({param(p, "vx"), param(p, "vy"), param(p, "vz")});
  Model m;
  m.name = "uniform";
  m.summary = "irrotational uniform stream v = const, p = 0";
  m.params = p;
  m.bernoulli_constant = true;
  m.velocity = [u](const Point&, double) { return u; };
  m.sample_lo = Point::Constant(3, -2.0);
  m.sample_hi = Point::Constant(3, 2.0);
  m.seed = Point::Zero(3);
  m.section = section(Point::Zero(3), Matrix::Identity(3, 3), 0.5, 1.0, make_vec({0, 0, 1}), 1.0);
  return m;
}

struct HillParams {
  double a, U;
};

// Rest-frame velocity and Bernoulli function at offset y from the centre.
Vector hill_rest_velocity(const HillParams& h, const Point& y) {
  const double a2 = h.a * h.a;
  const double w2 = y[0] * y[0] + y[1] * y[1];
  const double r2 = w2 + y[2] * y[2];
  if (r2 < a2) {
    const double c = -1.5 * h.U / a2;
    return make_vec({c * y[0] * y[2], c * y[1] * y[2], -1.5 * h.U * (1.0 - 2.0 * w2 / a2 - y[2] * y[2] / a2)});
  }
  const double r = std::sqrt(r2);
  const double r5 = r2 * r2 * r;
  const double a3 = a2 * h.a;
  return make_vec({-1.5 * h.U * a3 * y[0] * y[2] / r5, -1.5 * h.U * a3 * y[1] * y[2] / r5,
                   h.U * (1.0 - a3 / (r2 * r)) + 1.5 * h.U * a3 * w2 / r5});
}

double hill_rest_bernoulli(const HillParams& h, const Point& y) {
  const double a2 = h.a * h.a;
  const double w2 = y[0] * y[0] + y[1] * y[1];
  const double r2 = w2 + y[2] * y[2];
  const double far = 0.5 * h.U * h.U;
  if (r2 >= a2) return far;
  const double psi = -0.75 * h.U * w2 * (1.0 - r2 / a2);
  return far + 7.5 * h.U / a2 * psi;
}

Model hill_vortex(const std::map<std::string, double>& p) {
  const HillParams h{param(p, "a"), param(p, "U")};
  Model m;
  m.name = "hill_vortex";
  m.summary = "Hill's spherical vortex translating with speed U along -z (lab frame, unsteady)";
  m.params = p;
  m.steady = false;
  m.half_width = 4.0;
  auto centre = [h](double t) { return make_point({0.0, 0.0, -h.U * t}); };
  m.velocity = [h, centre](const Point& x, double t) {
    Vector u = hill_rest_velocity(h, x - centre(t));
    u[2] -= h.U;
    return u;
  };
  m.pressure = [h, centre](const Point& x, double t) {
    const Point y = x - centre(t);
    return hill_rest_bernoulli(h, y) - 0.5 * hill_rest_velocity(h, y).squaredNorm();
  };
  const double shell = 10.0 * 1e-5 * std::max(1.0, h.a);
  m.extended_exclusions.push_back(
      {"discontinuity shell |r - a| <= " + std::to_string(shell), [h, shell](const Point& q) {
         const Point y = make_point({q[0], q[1], q[2] + h.U * q[3]});
         return std::abs(y.norm() - h.a) <= shell;
       }});
  m.sample_lo = Point::Constant(3, -1.5 * h.a);
  m.sample_hi = Point::Constant(3, 1.5 * h.a);
  m.t_lo = 0.0;
  m.t_hi = 0.5;
  m.seed = make_point({0.5 * h.a, 0.0, 0.0});
  m.section = section(make_point({0, 0, 0.2 * h.a}), Matrix::Identity(3, 3), 0.3 * h.a, 0.5 * h.a,
                      make_vec({0, 1, 0}), 0.5);
  return m;
}

Model oscillator(const std::map<std::string, double>& p) {
  const double w = param(p, "omega");
  Model m;
  m.name = "oscillator";
  m.summary = "harmonic oscillator H = omega (q^2 + p^2) / 2 with alpha = p dq, beta = -H";
  m.kind = ScenarioKind::Hamiltonian;
  m.params = p;
  m.n = 2;
  m.velocity = [w](const Point& x, double) { return make_vec({w * x[1], -w * x[0]}); };
  m.alpha = [](const Point& x, double) { return AltTensord::covector(make_vec({x[1], 0.0})); };
  m.beta = [w](const Point& x, double) { return AltTensord::scalar(2, -0.5 * w * x.squaredNorm()); };
  m.sample_lo = Point::Constant(2, -2.0);
  m.sample_hi = Point::Constant(2, 2.0);
  m.seed = make_point({1.0, 0.0});
  m.section = section(make_point({0.5, 0.2}), Matrix::Identity(2, 2), 0.4, 0.4, make_vec({1, 0}), 1.0);
  return m;
}

Model r5_decomposable(const std::map<std::string, double>& p) {
  Model m;
  m.name = "r5_decomposable";
  m.summary = "constructed example on R^5: alpha = x1 dx2^dx3, d alpha = dx1^dx2^dx3, v = d/dx4, beta = 0";
  m.kind = ScenarioKind::Abstract;
  m.constructed = true;
  m.params = p;
  m.n = 5;
  m.k = 2;
  m.velocity = [](const Point&, double) { return Vector(Vector::Unit(5, 3)); };
  m.alpha = [](const Point& x, double) {
    AltTensord a(5, 2);
    a[{1, 2}] = x[0];
    return a;
  };
  m.beta = [](const Point&, double) { return AltTensord(5, 1); };
  m.sample_lo = Point::Constant(5, -1.0);
  m.sample_hi = Point::Constant(5, 1.0);
  m.seed = Point::Zero(5);
  m.section = section(Point::Zero(5), Matrix::Identity(5, 5), 1.0, 1.0, Vector::Unit(5, 3), 1.0);
  m.section_flux = [](const Point&, double edge) { return edge * edge * edge; };
  return m;
}

Model curved_graph(const std::map<std::string, double>& p, bool drifting) {
  Vector c = Vector::Zero(4);
  if (drifting) c << param(p, "c1"), param(p, "c2"), param(p, "c3"), 0.0;
  Model m;
  m.name = drifting ? "drifting_graph" : "curved_graph";
  m.summary = drifting ? "constructed time-dependent example on R^4: alpha = F(x - c t) dx4 with "
                         "F = y3 + y1 y2, v = c (c4 = 0), beta = 0"
                       : "constructed example on R^4: alpha = (x3 + x1 x2) dx4, v = d/dx1 - x2 d/dx3, "
                         "beta = 0; D is tangent to the graphs x3 = const - x1 x2";
  m.kind = ScenarioKind::Abstract;
  m.constructed = true;
  m.steady = !drifting;
  m.params = p;
  m.n = 4;
  m.k = 1;
  if (drifting)
    m.velocity = [c](const Point&, double) { return c; };
  else
    m.velocity = [](const Point& x, double) { return make_vec({1.0, 0.0, -x[1], 0.0}); };
  m.alpha = [c](const Point& x, double t) {
    const Point y = x - t * c;
    return AltTensord::covector(make_vec({0, 0, 0, y[2] + y[0] * y[1]}));
  };
  m.beta = [](const Point&, double) { return AltTensord::scalar(4, 0.0); };
  m.sample_lo = Point::Constant(4, -1.0);
  m.sample_hi = Point::Constant(4, 1.0);
  m.seed = Point::Zero(4);
  m.section = section(Point::Zero(4), permuted_frame(4, {2, 3, 0, 1}), 0.5, 0.5, Vector::Unit(4, 0), 0.5);
  if (!drifting) m.section_flux = [](const Point&, double r) { return std::numbers::pi * r * r; };
  return m;
}

Model strain(const std::map<std::string, double>& p) {
  Model m;
  m.name = "strain";
  m.summary = "non-solution fixture: pure strain v = (x, -y, 0) with p = 0";
  m.params = p;
  m.solution = false;
  m.velocity = [](const Point& x, double) { return make_vec({x[0], -x[1], 0.0}); };
  m.sample_lo = Point::Constant(3, -1.0);
  m.sample_hi = Point::Constant(3, 1.0);
  m.seed = make_point({0.5, 0.2, 0.1});
  m.section = section(make_point({0.5, 0.5, 0}), Matrix::Identity(3, 3), 0.3, 0.3, make_vec({0, 0, 1}), 0.5);
  return m;
}

Model sheared_rotation(const std::map<std::string, double>& p) {
  Model m;
  m.name = "sheared_rotation";
  m.summary = "non-solution fixture: v = (1 + z)(-y, x, 0) with p = 0; vorticity is not carried by the flow";
  m.params = p;
  m.solution = false;
  m.velocity = [](const Point& x, double) {
    return make_vec({-x[1] * (1 + x[2]), x[0] * (1 + x[2]), 0.0});
  };
  m.sample_lo = Point::Constant(3, -1.0);
  m.sample_hi = Point::Constant(3, 1.0);
  m.seed = make_point({0.5, 0.2, 0.1});
  m.section = section(Point::Zero(3), Matrix::Identity(3, 3), 0.3, 0.5, make_vec({0, 0, 1}), 0.5);
  return m;
}

const std::vector<std::string>& names() {
  static const std::vector<std::string> n = {
      "rigid_rotation", "rigid_rotation_gravity", "taylor_green", "abc",           "uniform",
      "hill_vortex",    "oscillator",             "r5_decomposable", "curved_graph", "drifting_graph",
      "strain",         "sheared_rotation"};
  return n;
}

std::string catalog_list() {
  std::string out;
  for (const auto& n : names()) out += (out.empty() ? "" : ", ") + n;
  return out;
}

}  // namespace

std::vector<std::string> catalog() { return names(); }

std::map<std::string, double> default_params(const std::string& name) {
  if (name == "rigid_rotation") return {{"omega", 1.0}};
  if (name == "rigid_rotation_gravity") return {{"omega", 1.0}, {"g", 9.81}};
  if (name == "abc") return {{"A", 1.0}, {"B", 1.0}, {"C", 1.0}};
  if (name == "uniform") return {{"vx", 0.3}, {"vy", -0.2}, {"vz", 0.5}};
  if (name == "hill_vortex") return {{"a", 1.0}, {"U", 1.0}};
  if (name == "oscillator") return {{"omega", 1.0}};
  if (name == "drifting_graph") return {{"c1", 0.3}, {"c2", -0.2}, {"c3", 0.1}};
  if (std::find(names().begin(), names().end(), name) != names().end()) return {};
  throw ScenarioError("unknown scenario '" + name + "'; available: " + catalog_list());
}

Scenario load_scenario(const std::string& name, const std::map<std::string, double>& overrides,
                       bool check) {
  std::map<std::string, double> p = default_params(name);
  for (const auto& [key, value] : overrides) {
    if (!p.count(key)) {
      std::string known;
      for (const auto& kv : p) known += (known.empty() ? "" : ", ") + kv.first;
      throw ScenarioError("scenario '" + name + "' has no parameter '" + key + "'" +
                          (known.empty() ? std::string(" (it takes none)") : "; known: " + known));
    }
    p[key] = value;
  }
  Model m;
  if (name == "rigid_rotation") m = rigid_rotation(p, false);
  else if (name == "rigid_rotation_gravity") m = rigid_rotation(p, true);
  else if (name == "taylor_green") m = taylor_green(p);
  else if (name == "abc") m = abc(p);
  else if (name == "uniform") m = uniform(p);
  else if (name == "hill_vortex") m = hill_vortex(p);
  else if (name == "oscillator") m = oscillator(p);
  else if (name == "r5_decomposable") m = r5_decomposable(p);
  else if (name == "curved_graph") m = curved_graph(p, false);
  else if (name == "drifting_graph") m = curved_graph(p, true);
  else if (name == "strain") m = strain(p);
  else m = sheared_rotation(p);
  Scenario s = assemble(std::move(m));
  if (check) self_check(s);
  return s;
}

Scenario custom_fluid(const CustomFluidSpec& spec, bool check) {
  const int n = static_cast<int>(spec.velocity.size());
  if (n < 1 || n > 3) throw ScenarioError("custom fluid: need 1 to 3 velocity components");
  std::vector<std::string> vars = {"x", "y", "z"};
  vars.resize(static_cast<std::size_t>(n));
  vars.push_back("t");
  std::vector<Expression> comps;
  for (const auto& text : spec.velocity) comps.push_back(Expression::parse(text, vars));
  const Expression pressure = Expression::parse(spec.pressure, vars);
  const Expression potential = Expression::parse(spec.potential, vars);
  auto args = [n](const Point& x, double t) {
    Eigen::VectorXd a(n + 1);
    a << x, t;
    return a;
  };
  Model m;
  m.name = "custom";
  m.summary = "fluid from configuration expressions";
  m.steady = spec.steady;
  m.solution = spec.solution;
  m.n = n;
  m.half_width = spec.half_width;
  m.velocity = [comps, args, n](const Point& x, double t) {
    const Eigen::VectorXd a = args(x, t);
    Vector u(n);
    for (int i = 0; i < n; ++i) u[i] = comps[static_cast<std::size_t>(i)](a);
    return u;
  };
  m.pressure = [pressure, args](const Point& x, double t) { return pressure(args(x, t)); };
  m.potential = [potential, args](const Point& x, double t) { return potential(args(x, t)); };
  const double box = std::min(1.0, 0.5 * spec.half_width);
  m.sample_lo = Point::Constant(n, -box);
  m.sample_hi = Point::Constant(n, box);
  m.seed = Point::Constant(n, 0.25 * box);
  Vector axis = Vector::Zero(n);
  axis[n - 1] = 1.0;
  m.section = section(Point::Zero(n), Matrix::Identity(n, n), 0.5 * box, box, axis, 0.5);
  Scenario s = assemble(std::move(m));
  if (check) self_check(s);
  return s;
}

std::vector<Point> sample_points(const Scenario& s, int count, std::uint64_t seed, bool extended) {
  std::mt19937_64 rng(seed);
  const int n = s.spatial_dim;
  const Domain& dom = extended ? s.extended_domain : s.domain;
  const int dim = extended ? n + 1 : n;
  std::vector<Point> out;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr double kMargin = 1e-4;
  for (long tries = 0; static_cast<int>(out.size()) < count; ++tries) {
    if (tries > 1000L * std::max(count, 1))
      throw ScenarioError("sample_points: could not place points inside the domain of '" + s.name + "'");
    Point x(dim);
    for (int i = 0; i < n; ++i) x[i] = s.sample_lo[i] + (s.sample_hi[i] - s.sample_lo[i]) * unit(rng);
    if (extended) x[n] = s.t_lo + (s.t_hi - s.t_lo) * unit(rng);
    bool ok = dom.contains(x);
    for (int i = 0; ok && i < dim; ++i)
      for (double sgn : {-1.0, 1.0}) {
        Point y = x;
        y[i] += sgn * kMargin;
        ok = ok && dom.contains(y);
      }
    if (ok) out.push_back(x);
  }
  return out;
}

DifferentialForm invariance_residual_form(const Scenario& s) {
  if (!s.steady) throw ScenarioError("'" + s.name + "' is time-dependent; use the extended-space residuals");
  return interior(s.v, d(s.alpha)) - d(s.beta);
}

AltTensord stationary_euler_residual(const Scenario& s, const Point& x) {
  if (s.kind != ScenarioKind::Fluid) throw ScenarioError("'" + s.name + "' is not a fluid scenario");
  if (!s.steady) throw ScenarioError("'" + s.name + "' is not steady");
  return (interior(s.v, d(flat(s.v))) + d(s.bernoulli))(x);
}

namespace {

// Splits an extended tensor a = dt∧S + R into (R, S) with S = i_∂t a.
std::pair<AltTensord, AltTensord> split_time(const AltTensord& a, int n) {
  const AltTensord s_part = interior(Vector(Vector::Unit(n + 1, n)), a);
  const AltTensord dt = AltTensord::basis_covector(n + 1, n);
  return {a - wedge(dt, s_part), s_part};
}

// Spatial velocity field at a fixed time, for unsteady scenarios.
VectorField velocity_slice(const Scenario& s, double t) {
  if (s.steady) return s.v;
  const VectorField vh = s.v_hat;
  const int n = s.spatial_dim;
  return VectorField(n, false, Domain(n, s.domain.upper()[0]),
                     [vh, n, t](const Point& x) { return Vector(vh(extended_point(x, t)).head(n)); },
                     "v(., t)");
}

}  // namespace

EquivalenceSample cartan_residuals(const Scenario& s, const Point& x) {
  const int n = s.spatial_dim;
  if (x.size() != n + 1) throw ScenarioError("cartan_residuals: expected an extended point");
  const DifferentialForm decomposed = time_derivative(s.alpha_hat) +
                                      interior(s.v_hat, spatial_exterior_derivative(s.alpha_hat)) -
                                      spatial_exterior_derivative(s.beta_hat);
  const DifferentialForm solution = interior(s.xi, d(s.sigma));
  EquivalenceSample e;
  e.point = x;
  e.decomposed = decomposed(x);
  e.solution = solution(x);
  const auto [spatial, time_part] = split_time(e.solution, n);
  e.decomposed_norm = e.decomposed.norm();
  e.solution_norm = e.solution.norm();
  e.spatial_norm = spatial.norm();
  e.spatial_mismatch = (spatial - e.decomposed).norm();
  const AltTensord iv = interior(s.v_hat(x), e.decomposed);
  e.time_mismatch = (time_part + iv).norm();
  return e;
}

EquivalenceSample unsteady_euler_residual(const Scenario& s, const Point& x_ext) {
  if (s.kind != ScenarioKind::Fluid) throw ScenarioError("'" + s.name + "' is not a fluid scenario");
  return cartan_residuals(s, x_ext);
}

bool vanish_together(const EquivalenceSample& e, double tol) {
  const bool a = e.decomposed_norm < tol;
  const bool b = e.spatial_norm < tol;
  if (a && b) return true;
  if (a != b) return false;
  const double ratio = e.spatial_norm / e.decomposed_norm;
  return ratio >= 0.5 && ratio <= 2.0;
}

Vector curl(const VectorField& v, const Point& x) {
  if (v.dim() != 3 || v.extended()) throw ScenarioError("curl: needs a spatial field on R^3");
  Matrix jac(3, 3);
  for (int j = 0; j < 3; ++j) {
    const double h = fd_step(x[j]);
    Point xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    jac.col(j) = (v(xp) - v(xm)) / (xp[j] - xm[j]);
  }
  return make_vec({jac(2, 1) - jac(1, 2), jac(0, 2) - jac(2, 0), jac(1, 0) - jac(0, 1)});
}

double vorticity_mismatch(const Scenario& s, const Point& x) {
  if (s.kind != ScenarioKind::Fluid || s.spatial_dim != 3)
    throw ScenarioError("vorticity_mismatch: needs a fluid on R^3");
  const double t = s.steady ? 0.0 : s.t_lo;
  const VectorField v = velocity_slice(s, t);
  const AltTensord dv = d(flat(v))(x);
  const Vector w = curl(v, x);
  return std::max({std::abs(dv[{1, 2}] - w[0]), std::abs(dv[{0, 2}] + w[1]), std::abs(dv[{0, 1}] - w[2])});
}

BernoulliReport bernoulli_checks(const Scenario& s, double tol, int seeds, std::uint64_t seed) {
  if (s.kind != ScenarioKind::Fluid || !s.steady)
    throw ScenarioError("Bernoulli checks need a steady fluid; '" + s.name + "' is not one");
  BernoulliReport r;
  r.tolerance = tol;
  const DifferentialForm grad_e = d(s.bernoulli);
  const DifferentialForm dv = d(s.alpha);
  std::vector<Point> starts = {s.seed};
  for (const Point& p : sample_points(s, seeds, seed, false)) starts.push_back(p);

  for (const Point& x0 : starts) {
    try {
      const Trajectory tr = trajectory(s.v, x0, 1.0, 50);
      for (const Point& x : tr.points)
        r.streamline_max = std::max(r.streamline_max, std::abs(grad_e(x).comps().dot(s.v(x))));
    } catch (const DomainError& e) {
      r.notes.push_back(std::string("streamline from ") + format_point(x0) + " left the domain: " + e.what());
    }
  }

  double max_dv = 0.0;
  const auto probes = sample_points(s, 50, seed + 1, false);
  double e_min = std::numeric_limits<double>::infinity(), e_max = -e_min;
  for (const Point& x : probes) {
    max_dv = std::max(max_dv, dv(x).max_abs());
    const double e = s.bernoulli.scalar(x);
    e_min = std::min(e_min, e);
    e_max = std::max(e_max, e);
  }
  r.variation = e_max - e_min;
  r.irrotational = max_dv < 1e-8;

  if (!r.irrotational) {
    for (const Point& x0 : starts) {
      try {
        const VortexLine line = trace_vortex_line(dv, x0, 1.0);
        ++r.vortex_lines_traced;
        for (std::size_t i = 0; i < line.nodes.size(); ++i)
          r.vortex_line_max =
              std::max(r.vortex_line_max, std::abs(grad_e(line.nodes[i]).comps().dot(line.tangents[i])));
        if (!line.complete) r.notes.push_back("vortex line from " + format_point(x0) + " stopped: " + line.stop_reason);
      } catch (const KernelError& e) {
        r.notes.push_back("no vortex line at " + format_point(x0) + ": " + e.what());
      }
    }
  } else {
    r.notes.push_back("flow is irrotational; E is constant throughout, checked via its variation");
  }

  r.passed = r.streamline_max < tol && r.vortex_line_max < tol;
  if (s.bernoulli_constant || r.irrotational) r.passed = r.passed && r.variation < tol;
  return r;
}

void self_check(const Scenario& s) {
  if (!s.solution) return;
  auto fail = [&](const std::string& what) { throw ScenarioError("self-check failed for '" + s.name + "': " + what); };
  if (s.steady) {
    const DifferentialForm res = invariance_residual_form(s);
    for (const Point& x : sample_points(s, 50, 0x5e1f, false)) {
      const double r = res(x).max_abs();
      if (r > 1e-5) fail("|i_v d alpha - d beta| = " + std::to_string(r) + " at " + format_point(x));
    }
  } else {
    const DifferentialForm res = interior(s.xi, d(s.sigma));
    for (const Point& x : sample_points(s, 20, 0x5e1f, true)) {
      const double r = res(x).max_abs();
      if (r > 1e-4) fail("|i_xi d sigma| = " + std::to_string(r) + " at " + format_point(x));
    }
  }
  if (s.kind == ScenarioKind::Fluid && s.spatial_dim == 3) {
    const double t = s.steady ? 0.0 : s.t_lo;
    const VectorField v = velocity_slice(s, t);
    const bool beltrami = s.name == "abc";
    for (const Point& x : sample_points(s, 10, 0xc011, false)) {
      const double m = vorticity_mismatch(s, x);
      if (m > 1e-6) fail("d of the velocity 1-form disagrees with the curl by " + std::to_string(m));
      if (beltrami) {
        const double b = (curl(v, x) - v(x)).cwiseAbs().maxCoeff();
        if (b > 1e-6) fail("curl v differs from v by " + std::to_string(b));
      }
    }
  }
}

}  // namespace cartan
