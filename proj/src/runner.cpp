#include "cartan/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <future>
#include <sstream>

#include "cartan/expression.hpp"
#include "cartan/invariants.hpp"
#include "cartan/kernel.hpp"

namespace cartan {

namespace {

// Cells of degree three and up multiply node counts quickly; they use at most
// this many Gauss nodes per axis.
constexpr int kHighDegreeQuad = 4;
constexpr int kTubeSectors = 4;

std::uint64_t salted(const RunConfig& cfg, std::uint64_t salt) { return cfg.seed * 0x9e3779b97f4a7c15ULL + salt; }

Chain with_quad(const Chain& c, const RunConfig& cfg) {
  return c.with_quad_order(c.degree() <= 2 ? cfg.quad_order : std::min(cfg.quad_order, kHighDegreeQuad));
}

std::vector<std::string> coord_columns(int n, bool extended) {
  std::vector<std::string> cols;
  for (int i = 1; i <= n; ++i) cols.push_back("x" + std::to_string(i));
  if (extended) cols.push_back("t");
  return cols;
}

void append_point(std::vector<std::string>& row, const Point& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) row.push_back(format_number(x[i]));
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

Vector pad(const Vector& v) {
  Vector out = Vector::Zero(v.size() + 1);
  out.head(v.size()) = v;
  return out;
}

/// Variables available to expressions: x1..xn, x/y/z for n <= 3, and t.
std::vector<std::string> expression_variables(int n) {
  std::vector<std::string> vars;
  for (int i = 1; i <= n; ++i) vars.push_back("x" + std::to_string(i));
  const char* short_names[] = {"x", "y", "z"};
  if (n <= 3)
    for (int i = 0; i < n; ++i) vars.emplace_back(short_names[i]);
  vars.emplace_back("t");
  return vars;
}

Eigen::VectorXd expression_values(int n, const Point& x_ext) {
  const int aliases = n <= 3 ? n : 0;
  Eigen::VectorXd vals(n + aliases + 1);
  vals.head(n) = x_ext.head(n);
  vals.segment(n, aliases) = x_ext.head(aliases);
  vals[n + aliases] = x_ext[n];
  return vals;
}

Expression parse_option_expression(const RunConfig& cfg, const std::string& check, const std::string& key, int n) {
  const std::string text = option_text(cfg, check, key);
  try {
    return Expression::parse(text, expression_variables(n));
  } catch (const ParseError& e) {
    const ConfigValue at = option_source(cfg, check, key);
    throw ConfigError("check " + check + ": bad expression for '" + key + "': " + e.what(), at.line,
                      at.line ? at.column + e.column() - 1 : 0);
  }
}

Point option_point(const RunConfig& cfg, const std::string& check, const std::string& key, const Point& fallback) {
  const auto v = option_vector(cfg, check, key);
  if (!v) return fallback;
  if (v->size() != fallback.size()) {
    const ConfigValue at = option_source(cfg, check, key);
    throw ConfigError("check " + check + ": '" + key + "' needs " + std::to_string(fallback.size()) +
                          " components, got " + std::to_string(v->size()),
                      at.line, at.column);
  }
  return *v;
}

double option_or(const RunConfig& cfg, const std::string& check, const std::string& key, double fallback) {
  return option_source(cfg, check, key).line ? option_number(cfg, check, key) : fallback;
}

/// Closed loop of degree `k` around `center`: a circle for k = 1, otherwise
/// the boundary of a (k + 1)-cube of half edge `radius` in the section frame.
Chain make_cycle(const Scenario& s, int k, const Point& center, double radius, bool extended, double t0) {
  const Matrix& f = s.section.frame;
  auto lift = [&](const Vector& v) { return extended ? pad(v) : v; };
  Point c = center;
  if (extended) c = extended_point(center, t0);
  if (k == 1) return circle(c, radius, lift(f.col(0)), lift(f.col(1)), 8, extended);
  Matrix edges(c.size(), k + 1);
  Point origin = c;
  for (int j = 0; j <= k; ++j) {
    edges.col(j) = 2.0 * radius * lift(f.col(j));
    origin -= radius * lift(f.col(j));
  }
  return boundary(parallelotope(origin, edges, extended));
}

std::vector<double> time_grid(double t_end, int samples) {
  std::vector<double> ts;
  if (samples == 1) return {0.0};
  for (int i = 0; i < samples; ++i) ts.push_back(t_end * i / (samples - 1));
  return ts;
}

DifferentialForm steady_dalpha(const Scenario& s) { return d(s.alpha); }

void require_applicable(const CheckInfo& info, const RunConfig& cfg, const Scenario& s) {
  const ConfigValue at = cfg.check_at.count(info.name) ? cfg.check_at.at(info.name) : ConfigValue{};
  if (info.needs_steady && !s.steady)
    throw ConfigError("check " + info.name + " needs a steady scenario; '" + s.name + "' is time-dependent", at.line,
                      at.column);
  if (info.needs_fluid && s.kind != ScenarioKind::Fluid)
    throw ConfigError("check " + info.name + " needs a fluid scenario; '" + s.name + "' is " + to_string(s.kind),
                      at.line, at.column);
  auto kernel_needed = [&](const Point& x, bool line) {
    const KernelFrame f = kernel_at(steady_dalpha(s), x);
    if (f.degenerate)
      throw ConfigError("check " + info.name + ": d(alpha) vanishes at " + format_point(x) + " in '" + s.name + "'",
                        at.line, at.column);
    if (f.dim() == 0)
      throw ConfigError("check " + info.name + ": the kernel of d(alpha) is trivial in '" + s.name + "'", at.line,
                        at.column);
    if (line && f.dim() != 1)
      throw ConfigError("check " + info.name + " follows one-dimensional kernels; dim D = " + std::to_string(f.dim()) +
                            " in '" + s.name + "'",
                        at.line, at.column);
  };
  const int n = s.spatial_dim;
  if (info.name == "helmholtz_lines") kernel_needed(option_point(cfg, info.name, "seed", s.seed), true);
  if (info.name == "surface_advect") kernel_needed(option_point(cfg, info.name, "seed", s.seed), false);
  if (info.name == "tube_strength") kernel_needed(option_point(cfg, info.name, "center", s.section.center), false);
  if (info.name == "kelvin" || info.name == "tube_of_solutions") {
    option_point(cfg, info.name, "center", s.section.center);
    if (s.degree + 1 > n)
      throw ConfigError("check " + info.name + ": no closed " + std::to_string(s.degree) + "-cycle fits in dimension " +
                            std::to_string(n),
                        at.line, at.column);
  }
  if (info.name == "tube_of_solutions") parse_option_expression(cfg, info.name, "duration", n);
}

// --- checks ----------------------------------------------------------------

void check_euler_residual(CheckResult& r, const Scenario& s, const RunConfig& cfg) {
  const std::string name = "euler_residual";
  const double tol = check_tolerance(cfg, name);
  const double ratio_tol = option_number(cfg, name, "ratio_tol");
  const int n = s.spatial_dim;
  double worst = 0.0;
  Table res{name, concat(coord_columns(n, !s.steady), {"residual"}), {}};
  if (s.steady) {
    const DifferentialForm form = invariance_residual_form(s);
    for (const Point& x : sample_points(s, option_count(cfg, name, "points"), salted(cfg, 1), false)) {
      const double v = form(x).max_abs();
      worst = std::max(worst, v);
      std::vector<std::string> row;
      append_point(row, x);
      row.push_back(format_number(v));
      res.add_row(std::move(row));
    }
  }

  Table eq{"euler_equivalence",
           concat(coord_columns(n, true), {"decomposed_norm", "solution_norm", "spatial_norm", "spatial_mismatch",
                                           "time_mismatch", "vanish_together"}),
           {}};
  bool together = true;
  double mismatch = 0.0, time_mismatch = 0.0, ext_worst = 0.0;
  for (const Point& x : sample_points(s, option_count(cfg, name, "ext_points"), salted(cfg, 2), true)) {
    const EquivalenceSample e = cartan_residuals(s, x);
    const bool ok = vanish_together(e, ratio_tol);
    together = together && ok;
    const double scale = std::max(1.0, e.decomposed_norm);
    mismatch = std::max(mismatch, e.spatial_mismatch / scale);
    time_mismatch = std::max(time_mismatch, e.time_mismatch / scale);
    ext_worst = std::max(ext_worst, e.solution.max_abs());
    std::vector<std::string> row;
    append_point(row, x);
    for (double v : {e.decomposed_norm, e.solution_norm, e.spatial_norm, e.spatial_mismatch, e.time_mismatch})
      row.push_back(format_number(v));
    row.push_back(ok ? "1" : "0");
    eq.add_row(std::move(row));
    if (!s.steady) {
      std::vector<std::string> rrow;
      append_point(rrow, x);
      rrow.push_back(format_number(e.solution.max_abs()));
      res.add_row(std::move(rrow));
    }
  }
  if (!s.steady) worst = ext_worst;

  constexpr double kAgreement = 1e-6;
  r.metric("form", s.steady ? (s.kind == ScenarioKind::Fluid ? "i_v d(v~) + dE" : "i_v d(alpha) - d(beta)")
                            : "i_xi d(sigma)");
  r.metric("max_residual", worst);
  r.metric("tol", tol);
  r.metric("vanish_together", together);
  r.metric("max_spatial_mismatch_rel", mismatch);
  r.metric("max_time_mismatch_rel", time_mismatch);
  r.metric("ratio_tol", ratio_tol);
  if (!s.solution) r.notes.push_back("scenario is a non-solution fixture; a large residual is expected");
  r.passed = worst < tol && together && mismatch < kAgreement && time_mismatch < kAgreement;
  r.tables.push_back(std::move(res));
  r.tables.push_back(std::move(eq));
}

void check_bernoulli(CheckResult& r, const Scenario& s, const RunConfig& cfg) {
  const std::string name = "bernoulli";
  const double tol = check_tolerance(cfg, name);
  const double line_tol = option_number(cfg, name, "line_tol");
  const BernoulliReport b = bernoulli_checks(s, tol, option_count(cfg, name, "seeds"), salted(cfg, 3));
  r.metric("streamline_max", b.streamline_max);
  r.metric("vortex_line_max", b.vortex_line_max);
  r.metric("vortex_lines_traced", b.vortex_lines_traced);
  r.metric("variation", b.variation);
  r.metric("irrotational", b.irrotational);
  r.metric("bernoulli_constant", s.bernoulli_constant);
  r.metric("tol", tol);
  r.metric("line_tol", line_tol);
  r.notes = b.notes;
  r.passed = b.streamline_max < tol && b.vortex_line_max < line_tol;
  if (b.irrotational || s.bernoulli_constant) r.passed = r.passed && b.variation < tol;
}

void check_kelvin(CheckResult& r, const Scenario& s, const RunConfig& cfg) {
  const std::string name = "kelvin";
  const double tol = check_tolerance(cfg, name);
  const int n = s.spatial_dim;
  const Point center = option_point(cfg, name, "center", s.section.center);
  const double radius = option_or(cfg, name, "radius", s.section.loop_radius);
  const std::vector<double> ts = time_grid(option_number(cfg, name, "t_end"), option_count(cfg, name, "samples"));
  const bool ext = !s.steady;
  const Chain loop = with_quad(make_cycle(s, s.degree, center, radius, ext, s.t_lo), cfg);
  const VectorField& field = ext ? s.xi : s.v;
  const DifferentialForm& form = ext ? s.sigma : s.alpha;
  const Stepper stepper{option_number(cfg, name, "flow_step")};
  const InvariantReport rep = check_relative_invariant(field, form, loop, ts, {tol, stepper});

  Table drift{"kelvin_drift", {"t", "integral", "drift"}, {}};
  for (const auto& [t, v] : rep.samples)
    drift.add_row({format_number(t), format_number(v), format_number(std::abs(v - rep.samples.front().second))});
  Table nodes{"kelvin_loops", concat({"t", "node"}, coord_columns(n, ext)), {}};
  const std::vector<Point> base = chain_samples(loop, loop.degree() == 1 ? 4 : 2);
  for (double t : ts)
    for (std::size_t i = 0; i < base.size(); ++i) {
      std::vector<std::string> row{format_number(t), std::to_string(i)};
      append_point(row, t == 0.0 ? base[i] : advect_point(field, base[i], t, stepper));
      nodes.add_row(std::move(row));
    }
  r.metric("loop", s.degree == 1 ? "circle" : "boundary of a " + std::to_string(s.degree + 1) + "-cube");
  r.metric("space", ext ? "extended" : "spatial");
  r.metric("radius", radius);
  r.metric("integral_t0", rep.samples.front().second);
  r.metric("max_drift", rep.max_drift);
  r.metric("differential_residual", rep.differential_residual);
  r.metric("tol", tol);
  r.passed = rep.passed;
  r.tables.push_back(std::move(drift));
  r.tables.push_back(std::move(nodes));
}

void check_helmholtz_lines(CheckResult& r, const Scenario& s, const RunConfig& cfg) {
  const std::string name = "helmholtz_lines";
  const double tol = check_tolerance(cfg, name);
  const Point seed = option_point(cfg, name, "seed", s.seed);
  const double t = option_number(cfg, name, "t");
  LineMotionOptions o;
  o.length = option_number(cfg, name, "length");
  o.trace.step = option_number(cfg, name, "step");
  const LineMotionReport rep = check_lines_move_with_fluid(s.v, steady_dalpha(s), seed, t, o);

  Table tab{"helmholtz_lines", concat({"path", "node", "arc"}, concat(coord_columns(s.spatial_dim, false), {"distance"})),
            {}};
  auto emit = [&](const char* path, const std::vector<Point>& pts, const std::vector<double>& arc, bool dist) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      std::vector<std::string> row{path, std::to_string(i), format_number(arc[i])};
      append_point(row, pts[i]);
      row.push_back(dist ? format_number(distance_to_curve(pts[i], rep.retraced.nodes, rep.retraced.tangents)) : "");
      tab.add_row(std::move(row));
    }
  };
  emit("original", rep.original.nodes, rep.original.arc, false);
  emit("advected", rep.advected, rep.original.arc, true);
  emit("retraced", rep.retraced.nodes, rep.retraced.arc, false);
  r.metric("t", t);
  r.metric("nodes", static_cast<int>(rep.original.nodes.size()));
  r.metric("hausdorff", rep.hausdorff);
  r.metric("line_residual", rep.residual);
  r.metric("lie_residual", rep.lie_residual);
  r.metric("tol", tol);
  r.passed = rep.hausdorff < tol && rep.residual < tol;
  r.tables.push_back(std::move(tab));
}

void check_tube_strength(CheckResult& r, const Scenario& s, const RunConfig& cfg) {
  const std::string name = "tube_strength";
  const double tol = check_tolerance(cfg, name);
  const double flux_tol = option_number(cfg, name, "flux_tol");
  const Point center = option_point(cfg, name, "center", s.section.center);
  const double size = option_or(cfg, name, "size", s.section.size);
  const double param = option_or(cfg, name, "s", s.section.tube_length);
  const DifferentialForm dalpha = steady_dalpha(s);
  const int m = dalpha.degree();
  const Matrix& f = s.section.frame;
  TubeSpec tube;
  if (m == 2) {
    tube.transversal = disc(center, size, f.col(0), f.col(1), kTubeSectors);
    tube.seed_cycle = circle(center, size, f.col(0), f.col(1));
  } else {
    Matrix edges = size * f.leftCols(m);
    const Point origin = center - 0.5 * edges.rowwise().sum();
    tube.transversal = parallelotope(origin, edges);
    tube.seed_cycle = boundary(tube.transversal);
  }
  tube.transversal = with_quad(tube.transversal, cfg);
  tube.seed_cycle = with_quad(tube.seed_cycle, cfg);
  tube.along = kernel_field(dalpha, s.section.axis);
  const Stepper w_stepper{option_number(cfg, name, "w_step"), 10};
  const TubeReport rep = check_tube_strength(dalpha, tube, param, tol, {}, w_stepper);

  Table tab{"tube_sections", concat({"section", "node"}, coord_columns(s.spatial_dim, false)), {}};
  auto emit = [&](const char* label, const Chain& c) {
    const std::vector<Point> pts = chain_samples(c, 3);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      std::vector<std::string> row{label, std::to_string(i)};
      append_point(row, pts[i]);
      tab.add_row(std::move(row));
    }
  };
  emit("start", tube.transversal);
  emit("end", rep.end_section);
  r.metric("s", param);
  r.metric("size", size);
  r.metric("flux_start", rep.flux_start);
  r.metric("flux_end", rep.flux_end);
  r.metric("difference", rep.difference);
  r.metric("kernel_residual", rep.kernel_residual);
  r.metric("boundary_mismatch", rep.boundary_mismatch);
  r.metric("tol", tol);
  r.passed = rep.passed;
  if (s.section_flux) {
    const double exact = s.section_flux(center, size);
    r.metric("closed_form_flux", exact);
    r.metric("closed_form_error", std::abs(rep.flux_start - exact));
    r.metric("flux_tol", flux_tol);
    r.passed = r.passed && std::abs(rep.flux_start - exact) < flux_tol;
  }
  r.tables.push_back(std::move(tab));
}

void check_kernel_dims(CheckResult& r, const Scenario& s, const RunConfig& cfg) {
  const std::string name = "kernel_dims";
  const double tol = check_tolerance(cfg, name);
  const int count = option_count(cfg, name, "points");
  const int n = s.spatial_dim;
  const DifferentialForm dt = time_differential(s.extended_domain);

  // Dimension count: spatial dα for steady scenarios, dσ restricted to dt = 0 otherwise.
  const bool ext = !s.steady;
  const DifferentialForm form = ext ? d(s.sigma) : steady_dalpha(s);
  const Constraints cons = ext ? Constraints{dt} : Constraints{};
  const std::vector<Point> pts = sample_points(s, count, salted(cfg, 4), ext);
  const DimensionReport dims = dimension_report(form, pts, cons);
  Table dt_tab{"kernel_dims", concat(coord_columns(n, ext), {"rank", "dim_d", "bound"}), {}};
  bool bound_ok = true;
  int nondegenerate = 0;
  std::optional<int> expected;
  if (option_source(cfg, name, "expected_dim").line) expected = static_cast<int>(option_number(cfg, name, "expected_dim"));
  bool expected_ok = true;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const int rank = dims.ranks[i];
    const int dim = dims.kernel_dims[i];
    if (rank > 0) {
      ++nondegenerate;
      bound_ok = bound_ok && dim <= dims.bound;
    }
    if (expected) expected_ok = expected_ok && dim == *expected;
    std::vector<std::string> row;
    append_point(row, pts[i]);
    row.push_back(std::to_string(rank));
    row.push_back(std::to_string(dim));
    row.push_back(std::to_string(dims.bound));
    dt_tab.add_row(std::move(row));
  }

  // Spatial-kernel characterization on extended space.
  const DifferentialForm dsigma = d(s.sigma);
  const DifferentialForm dhat = spatial_exterior_derivative(s.alpha_hat);
  Table ang{"kernel_angles", concat(coord_columns(n, true), {"dim_sigma", "dim_hat", "angle"}), {}};
  double max_angle = 0.0;
  for (const Point& x : sample_points(s, count, salted(cfg, 5), true)) {
    const KernelFrame a = kernel_at(dsigma, x, {dt});
    const KernelFrame b = kernel_at(dhat, x, {dt});
    const double angle = max_principal_angle(a.basis, b.basis);
    max_angle = std::max(max_angle, angle);
    std::vector<std::string> row;
    append_point(row, x);
    row.push_back(std::to_string(a.dim()));
    row.push_back(std::to_string(b.dim()));
    row.push_back(format_number(angle));
    ang.add_row(std::move(row));
  }

  r.metric("space", ext ? "extended, restricted to dt = 0" : "spatial");
  r.metric("rank", dims.rank);
  r.metric("dim_d", dims.dim_d);
  r.metric("bound", dims.bound);
  r.metric("constant_rank", dims.constant_rank);
  r.metric("bound_satisfied", bound_ok);
  r.metric("bound_equality", dims.bound_equality);
  r.metric("nondegenerate_points", nondegenerate);
  if (expected) r.metric("expected_dim", *expected);
  r.metric("max_principal_angle", max_angle);
  r.metric("tol", tol);
  if (s.constructed) r.notes.push_back("constructed example built for testing, not a physical system");
  r.passed = bound_ok && expected_ok && (!s.solution || max_angle < tol);
  r.tables.push_back(std::move(dt_tab));
  r.tables.push_back(std::move(ang));
}

void check_frobenius(CheckResult& r, const Scenario& s, const RunConfig& cfg) {
  const std::string name = "frobenius";
  const double tol = check_tolerance(cfg, name);
  const bool ext = !s.steady;
  const DifferentialForm form = ext ? d(s.sigma) : steady_dalpha(s);
  const Constraints cons = ext ? Constraints{time_differential(s.extended_domain)} : Constraints{};
  Table tab{"frobenius", concat(coord_columns(s.spatial_dim, ext), {"dim_d", "residual"}), {}};
  double worst = 0.0;
  int evaluated = 0, degenerate = 0, skipped = 0;
  for (const Point& x : sample_points(s, option_count(cfg, name, "points"), salted(cfg, 6), ext)) {
    const KernelFrame f = kernel_at(form, x, cons);
    double res = 0.0;
    if (f.degenerate) {
      ++degenerate;
    } else {
      try {
        res = frobenius_residual(form, x, cons);
      } catch (const KernelError& e) {
        ++skipped;
        r.notes.push_back(std::string("skipped: ") + e.what());
        continue;
      }
    }
    ++evaluated;
    worst = std::max(worst, res);
    std::vector<std::string> row;
    append_point(row, x);
    row.push_back(std::to_string(f.dim()));
    row.push_back(format_number(res));
    tab.add_row(std::move(row));
  }
  r.metric("max_residual", worst);
  r.metric("points_evaluated", evaluated);
  r.metric("degenerate_points", degenerate);
  r.metric("skipped_points", skipped);
  r.metric("tol", tol);
  if (degenerate) r.notes.push_back("d(alpha) vanishes at some points; D is the whole space there");
  r.passed = evaluated > 0 && worst < tol;
  r.tables.push_back(std::move(tab));
}

void check_tube_of_solutions(CheckResult& r, const Scenario& s, const RunConfig& cfg) {
  const std::string name = "tube_of_solutions";
  const double tol = check_tolerance(cfg, name);
  const int n = s.spatial_dim;
  const Point center = option_point(cfg, name, "center", s.section.center);
  const double radius = option_or(cfg, name, "radius", s.section.loop_radius);
  const Expression tau = parse_option_expression(cfg, name, "duration", n);
  const DurationField duration = [tau, n](const Point& x) { return tau(expression_values(n, x)); };
  const Chain c1 = with_quad(make_cycle(s, s.degree, center, radius, true, s.t_lo), cfg);
  TubeOfSolutionsOptions o;
  o.tolerance = tol;
  o.solution_tolerance = option_number(cfg, name, "solution_tol");
  o.stepper = Stepper{option_number(cfg, name, "flow_step")};
  const InvariantReport rep = check_tube_of_solutions(s.xi, s.sigma, c1, duration, o);

  Table tab{"tube_cycles", concat({"cycle", "node", "duration"}, coord_columns(n, true)), {}};
  const std::vector<Point> base = chain_samples(c1, c1.degree() == 1 ? 4 : 2);
  for (std::size_t i = 0; i < base.size(); ++i) {
    std::vector<std::string> row{"1", std::to_string(i), format_number(0.0)};
    append_point(row, base[i]);
    tab.add_row(std::move(row));
  }
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double tau_i = duration(base[i]);
    std::vector<std::string> row{"2", std::to_string(i), format_number(tau_i)};
    append_point(row, advect_point(s.xi, base[i], tau_i, o.stepper));
    tab.add_row(std::move(row));
  }
  r.metric("duration", tau.text());
  r.metric("integral_c1", rep.samples[0].second);
  r.metric("integral_c2", rep.samples[1].second);
  r.metric("difference", rep.max_drift);
  r.metric("swept_flux", rep.swept_flux.value_or(0.0));
  r.metric("solution_residual", rep.differential_residual);
  r.metric("tol", tol);
  r.passed = rep.passed;
  r.tables.push_back(std::move(tab));
}

void check_surface_advect(CheckResult& r, const Scenario& s, const RunConfig& cfg) {
  const std::string name = "surface_advect";
  const double tol = check_tolerance(cfg, name);
  const Point seed = option_point(cfg, name, "seed", s.seed);
  const double t = option_number(cfg, name, "t");
  SurfaceOptions so;
  so.nodes_per_axis = std::max(2, option_count(cfg, name, "nodes"));
  so.orientation = s.section.axis;
  const DifferentialForm dalpha = steady_dalpha(s);
  const SurfaceMesh mesh = trace_integral_surface(dalpha, seed, option_number(cfg, name, "extent"), so);
  const SurfaceMesh moved = advect_surface(mesh, s.v, t, dalpha);

  std::vector<std::string> pcols;
  for (int j = 1; j <= mesh.dim; ++j) pcols.push_back("u" + std::to_string(j));
  Table tab{"surface", concat(concat({"stage", "node"}, pcols), concat(coord_columns(s.spatial_dim, false), {"residual"})),
            {}};
  auto emit = [&](const char* stage, const SurfaceMesh& m) {
    for (std::size_t i = 0; i < m.points.size(); ++i) {
      std::vector<std::string> row{stage, std::to_string(i)};
      append_point(row, m.params[i]);
      append_point(row, m.points[i]);
      row.push_back(format_number(m.residuals[i]));
      tab.add_row(std::move(row));
    }
  };
  emit("initial", mesh);
  emit("advected", moved);
  r.metric("dim_d", mesh.dim);
  r.metric("nodes", static_cast<int>(mesh.points.size()));
  r.metric("complete", mesh.complete);
  if (!mesh.complete) r.notes.push_back("surface stopped early: " + mesh.stop_reason);
  r.metric("initial_residual", mesh.max_residual);
  r.metric("advected_residual", moved.max_residual);
  r.metric("t", t);
  r.metric("tol", tol);
  r.passed = mesh.complete && mesh.max_residual < tol && moved.max_residual < tol;
  r.tables.push_back(std::move(tab));
}

using CheckFn = void (*)(CheckResult&, const Scenario&, const RunConfig&);

CheckFn check_function(const std::string& name) {
  if (name == "euler_residual") return check_euler_residual;
  if (name == "bernoulli") return check_bernoulli;
  if (name == "kelvin") return check_kelvin;
  if (name == "helmholtz_lines") return check_helmholtz_lines;
  if (name == "tube_strength") return check_tube_strength;
  if (name == "kernel_dims") return check_kernel_dims;
  if (name == "frobenius") return check_frobenius;
  if (name == "tube_of_solutions") return check_tube_of_solutions;
  if (name == "surface_advect") return check_surface_advect;
  throw ConfigError("unknown check '" + name + "'", 0, 0);
}

}  // namespace

Scenario build_scenario(const RunConfig& cfg) {
  if (cfg.scenario == "custom") {
    CustomFluidSpec spec;
    spec.velocity.clear();
    static const char* comps[] = {"vx", "vy", "vz"};
    for (int i = 0; i < 3; ++i) {
      const auto it = cfg.scenario_params.find(comps[i]);
      if (it == cfg.scenario_params.end()) {
        for (int j = i + 1; j < 3; ++j)
          if (const auto later = cfg.scenario_params.find(comps[j]); later != cfg.scenario_params.end())
            throw ConfigError(std::string(comps[j]) + " given without " + comps[i], later->second.line,
                              later->second.column);
        break;
      }
      spec.velocity.push_back(it->second.text);
    }
    for (const auto& [key, v] : cfg.scenario_params) {
      if (key == "vx" || key == "vy" || key == "vz") {
        continue;
      } else if (key == "pressure") {
        spec.pressure = v.text;
      } else if (key == "potential") {
        spec.potential = v.text;
      } else if (key == "half_width") {
        spec.half_width = parse_number(v.text, v.line, v.column);
        if (!(spec.half_width > 0.0)) throw ConfigError("half_width must be positive", v.line, v.column);
      } else if (key == "steady" || key == "solution") {
        const bool flag = v.text == "true" || v.text == "1" || v.text == "yes";
        if (!flag && v.text != "false" && v.text != "0" && v.text != "no")
          throw ConfigError("expected true or false, got '" + v.text + "'", v.line, v.column);
        (key == "steady" ? spec.steady : spec.solution) = flag;
      } else {
        throw ConfigError("custom scenario has no parameter '" + key +
                              "'; known: vx, vy, vz, pressure, potential, half_width, steady, solution",
                          v.line, v.column);
      }
    }
    if (spec.velocity.empty())
      throw ConfigError("custom scenario needs at least vx", cfg.scenario_at.line, cfg.scenario_at.column);
    try {
      return custom_fluid(spec);
    } catch (const ParseError& e) {
      throw ConfigError(std::string("custom scenario: ") + e.what(), cfg.scenario_at.line, cfg.scenario_at.column);
    }
  }

  const auto known = catalog();
  if (std::find(known.begin(), known.end(), cfg.scenario) == known.end()) {
    std::string list;
    for (const auto& n : known) list += (list.empty() ? "" : ", ") + n;
    throw ConfigError("unknown scenario '" + cfg.scenario + "'; available: " + list + ", custom", cfg.scenario_at.line,
                      cfg.scenario_at.column);
  }
  const auto defaults = default_params(cfg.scenario);
  std::map<std::string, double> params;
  for (const auto& [key, v] : cfg.scenario_params) {
    if (!defaults.count(key)) {
      std::string names;
      for (const auto& kv : defaults) names += (names.empty() ? "" : ", ") + kv.first;
      throw ConfigError("scenario '" + cfg.scenario + "' has no parameter '" + key + "'" +
                            (names.empty() ? std::string(" (it takes none)") : "; known: " + names),
                        v.line, v.column);
    }
    params[key] = parse_number(v.text, v.line, v.column);
  }
  return load_scenario(cfg.scenario, params);
}

void validate_checks(const RunConfig& cfg, const Scenario& s) {
  for (const auto& name : cfg.checks) {
    const CheckInfo* info = find_check(name);
    if (!info) throw ConfigError("unknown check '" + name + "'", 0, 0);
    require_applicable(*info, cfg, s);
  }
}

CheckResult run_check(const std::string& check, const Scenario& s, const RunConfig& cfg) {
  CheckResult r;
  r.check = check;
  const auto start = std::chrono::steady_clock::now();
  try {
    check_function(check)(r, s, cfg);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    r.passed = false;
    r.error = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

RunReport run(const RunConfig& cfg, const RunOptions& opts) {
  const Scenario s = build_scenario(cfg);
  validate_checks(cfg, s);

  RunReport report;
  report.config_origin = cfg.origin;
  report.scenario = s.name;
  report.scenario_summary = s.summary;
  report.constructed = s.constructed;
  std::string checks;
  for (const auto& c : cfg.checks) checks += (checks.empty() ? "" : ", ") + c;
  report.config_echo.emplace_back("checks", checks);
  report.config_echo.emplace_back("seed", std::to_string(cfg.seed));
  report.config_echo.emplace_back("tol", cfg.tol ? format_number(*cfg.tol) : "per check");
  report.config_echo.emplace_back("quad_order", std::to_string(cfg.quad_order));
  report.config_echo.emplace_back("parallel", cfg.parallel ? "true" : "false");
  for (const auto& [k, v] : s.params) report.config_echo.emplace_back("param." + k, format_number(v));
  for (const auto& [check, opts_map] : cfg.check_options)
    for (const auto& [k, v] : opts_map) report.config_echo.emplace_back(check + "." + k, v.text);

  if (cfg.parallel && cfg.checks.size() > 1) {
    std::vector<std::future<CheckResult>> jobs;
    for (const auto& c : cfg.checks)
      jobs.push_back(std::async(std::launch::async, [&s, &cfg, c] { return run_check(c, s, cfg); }));
    for (auto& j : jobs) report.checks.push_back(j.get());
  } else {
    for (const auto& c : cfg.checks) report.checks.push_back(run_check(c, s, cfg));
  }

  if (!opts.out_dir.empty()) report.artifacts = write_artifacts(report, cfg, opts.out_dir, opts.timings);
  return report;
}

std::vector<std::string> write_artifacts(const RunReport& report, const RunConfig& cfg,
                                         const std::filesystem::path& dir, bool timings) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;
  const std::vector<std::pair<std::string, std::string>> base_meta = {{"scenario", report.scenario},
                                                                       {"seed", std::to_string(cfg.seed)}};
  for (const auto& c : report.checks)
    for (const auto& t : c.tables) {
      auto meta = base_meta;
      meta.emplace_back("check", c.check);
      write_atomic(dir / (t.name + ".csv"), render_csv(t, meta));
      written.push_back(t.name + ".csv");
    }
  write_atomic(dir / "summary.csv", render_csv(summary_table(report), base_meta));
  written.push_back("summary.csv");
  write_atomic(dir / "report.txt", render_report(report, timings));
  written.push_back("report.txt");
  return written;
}

std::filesystem::path resolve_out_dir(const std::string& explicit_dir, const RunConfig& cfg) {
  if (!explicit_dir.empty()) return explicit_dir;
  if (!cfg.out.empty()) return cfg.out;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return kDefaultOutDir;
}

std::string describe_check(const std::string& name) {
  const CheckInfo* info = find_check(name);
  if (!info) {
    std::string msg = "unknown check '" + name + "'";
    const auto hints = suggest_checks(name);
    if (!hints.empty()) {
      msg += "; did you mean ";
      for (std::size_t i = 0; i < hints.size(); ++i) msg += (i ? ", " : "") + hints[i];
      msg += "?";
    }
    throw ConfigError(msg, 0, 0);
  }
  std::ostringstream out;
  out << info->name << ": " << info->title << "\n\n" << info->description << "\n";
  if (info->needs_steady || info->needs_fluid)
    out << "\nApplies to " << (info->needs_fluid ? "steady fluid" : "steady") << " scenarios only.\n";
  out << "\nOptions ([check " << info->name << "] section):\n";
  for (const auto& k : info->keys)
    out << "  " << k.name << " = " << (k.fallback.empty() ? "<scenario default>" : k.fallback) << "    " << k.help
        << "\n";
  return out.str();
}

std::string list_text() {
  std::ostringstream out;
  out << "Scenarios:\n";
  for (const auto& name : catalog()) {
    const Scenario s = load_scenario(name, {}, false);
    out << "  " << name << " (" << to_string(s.kind) << (s.steady ? ", steady" : ", time-dependent")
        << (s.constructed ? ", constructed" : "") << (s.solution ? "" : ", non-solution fixture") << ")\n      "
        << s.summary << "\n";
    const auto params = default_params(name);
    if (!params.empty()) {
      out << "      parameters:";
      for (const auto& [k, v] : params) out << " " << k << "=" << v;
      out << "\n";
    }
  }
  out << "  custom (fluid from expressions vx, vy, vz, pressure, potential)\n";
  out << "\nChecks:\n";
  for (const auto& c : check_catalog()) out << "  " << c.name << "  " << c.title << "\n";
  return out.str();
}

}  // namespace cartan
