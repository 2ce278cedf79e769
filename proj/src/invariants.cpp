#include "cartan/invariants.hpp"

#include <algorithm>
#include <cmath>

namespace cartan {

std::string to_string(InvariantKind kind) {
  switch (kind) {
    case InvariantKind::Absolute: return "absolute";
    case InvariantKind::Relative: return "relative";
    case InvariantKind::TubeOfSolutions: return "tube_of_solutions";
  }
  return "unknown";
}

std::vector<Point> chain_samples(const Chain& c, int per_axis) {
  const Quadrature q = gauss_legendre(per_axis);
  std::vector<Point> out;
  for (const Cell& cell : c.cells()) {
    const int k = cell.degree;
    int total = 1;
    for (int j = 0; j < k; ++j) total *= per_axis;
    for (int idx = 0; idx < total; ++idx) {
      Vector u(k);
      int rem = idx;
      for (int j = 0; j < k; ++j) {
        u[j] = q.nodes[static_cast<std::size_t>(rem % per_axis)];
        rem /= per_axis;
      }
      out.push_back(cell(u));
    }
  }
  return out;
}

namespace {

InvariantReport drift_report(InvariantKind kind, const VectorField& v, const DifferentialForm& a,
                             const Chain& c, const std::vector<double>& ts,
                             const InvariantOptions& opts) {
  if (opts.tolerance <= 0.0) throw InvariantError("tolerance must be positive");
  if (a.degree() != c.degree())
    throw InvariantError("form degree " + std::to_string(a.degree()) + " does not match chain degree " +
                         std::to_string(c.degree()));
  InvariantReport r;
  r.kind = kind;
  r.tolerance = opts.tolerance;
  const double reference = integrate(a, c);
  for (double t : ts) {
    const double value = t == 0.0 ? reference : integrate(a, advect_chain(v, c, t, opts.stepper));
    r.samples.emplace_back(t, value);
    r.max_drift = std::max(r.max_drift, std::abs(value - reference));
  }
  const DifferentialForm lie = lie_derivative(v, a);
  if (kind == InvariantKind::Relative) {
    // only the cycle integral of L_v a has to vanish
    r.differential_residual = std::abs(integrate(lie, c));
  } else {
    for (const Point& x : chain_samples(c, 2))
      r.differential_residual = std::max(r.differential_residual, lie(x).max_abs());
  }
  r.passed = r.max_drift < r.tolerance;
  return r;
}

void require_solution_form(const VectorField& xi, const DifferentialForm& dsigma,
                           const std::vector<Point>& pts, double tol, double& worst) {
  for (const Point& x : pts) {
    const AltTensord ds = dsigma(x);
    const double res = interior(xi(x), ds).max_abs();
    worst = std::max(worst, res);
    if (res > tol * std::max(1.0, ds.norm()))
      throw InvariantError("not a solution form: |i_xi dsigma| = " + std::to_string(res) + " at " +
                           format_point(x));
  }
}

}  // namespace

InvariantReport check_absolute_invariant(const VectorField& v, const DifferentialForm& a,
                                         const Chain& c, const std::vector<double>& ts,
                                         const InvariantOptions& opts) {
  return drift_report(InvariantKind::Absolute, v, a, c, ts, opts);
}

InvariantReport check_relative_invariant(const VectorField& v, const DifferentialForm& a,
                                         const Chain& cycle, const std::vector<double>& ts,
                                         const InvariantOptions& opts) {
  const CycleProbe probe = probe_cycle(cycle, a.domain());
  if (!probe.is_cycle)
    throw InvariantError("chain is not a cycle: probe " + std::to_string(probe.failed_probe) + " (" +
                         probe.failed_description + ") integrates to " +
                         std::to_string(probe.max_boundary_integral) + " over the boundary");
  return drift_report(InvariantKind::Relative, v, a, cycle, ts, opts);
}

Chain slide_along(const VectorField& xi, const Chain& c, const DurationField& duration,
                  const Stepper& stepper) {
  return c.mapped([xi, duration, stepper](const Point& x) {
    return advect_point(xi, x, duration(x), stepper);
  });
}

Chain swept_tube(const VectorField& xi, const Chain& c, const DurationField& duration,
                 const Stepper& stepper) {
  Chain out(c.ambient_dim(), c.degree() + 1, c.extended());
  const int sign = (c.degree() + 1) % 2 ? -1 : 1;
  for (const Cell& cell : c.cells()) {
    Cell swept;
    swept.degree = cell.degree + 1;
    swept.weight = sign * cell.weight;
    swept.quad_order = cell.quad_order;
    const Cell::Map base = cell.map;
    const int k = cell.degree;
    swept.map = [base, k, xi, duration, stepper](const Vector& u) {
      const Point x = base(u.head(k));
      return advect_point(xi, x, u[k] * duration(x), stepper);
    };
    out.add(std::move(swept));
  }
  return out;
}

namespace {

InvariantReport tube_report(const VectorField& xi, const DifferentialForm& sigma, const Chain& c1,
                            const Chain& c2, const TubeOfSolutionsOptions& opts) {
  if (!xi.extended() || !sigma.extended())
    throw InvariantError("tube of solutions needs a field and form on extended space");
  if (opts.tolerance <= 0.0) throw InvariantError("tolerance must be positive");
  const CycleProbe probe = probe_cycle(c1, sigma.domain());
  if (!probe.is_cycle)
    throw InvariantError("c1 is not a cycle: probe " + std::to_string(probe.failed_probe) + " (" +
                         probe.failed_description + ")");
  InvariantReport r;
  r.kind = InvariantKind::TubeOfSolutions;
  r.tolerance = opts.tolerance;
  const DifferentialForm dsigma = d(sigma);
  require_solution_form(xi, dsigma, chain_samples(c1, 2), opts.solution_tolerance, r.differential_residual);
  require_solution_form(xi, dsigma, chain_samples(c2, 2), opts.solution_tolerance, r.differential_residual);
  const double i1 = integrate(sigma, c1);
  const double i2 = integrate(sigma, c2);
  r.samples = {{0.0, i1}, {1.0, i2}};
  r.max_drift = std::abs(i2 - i1);
  r.passed = r.max_drift < r.tolerance;
  return r;
}

}  // namespace

InvariantReport check_tube_of_solutions(const VectorField& xi, const DifferentialForm& sigma,
                                        const Chain& c1, const DurationField& duration,
                                        const TubeOfSolutionsOptions& opts) {
  InvariantReport r = tube_report(xi, sigma, c1, slide_along(xi, c1, duration, opts.stepper), opts);
  const double flux = integrate(d(sigma), swept_tube(xi, c1, duration, opts.stepper));
  r.swept_flux = flux;
  r.passed = r.passed && std::abs(flux) < r.tolerance;
  return r;
}

InvariantReport check_tube_of_solutions(const VectorField& xi, const DifferentialForm& sigma,
                                        const Chain& c1, const Chain& c2,
                                        const TubeOfSolutionsOptions& opts) {
  return tube_report(xi, sigma, c1, c2, opts);
}

}  // namespace cartan
