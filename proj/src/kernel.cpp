#include "cartan/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cartan {

namespace {

Matrix orthonormalize_in_order(const Matrix& w) {
  Matrix q = w;
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
    const double nrm = q.col(j).norm();
    if (nrm < 1e-8) throw KernelError("kernel frame degenerates: projected seed vector vanishes");
    q.col(j) /= nrm;
  }
  return q;
}

double annihilation_residual(const AltTensord& da, const Vector& t) {
  const double scale = da.norm() * t.norm();
  if (scale == 0.0) return 0.0;
  return interior(t, da).norm() / scale;
}

}  // namespace

KernelFrame kernel_of(const AltTensord& dalpha, const std::vector<AltTensord>& constraints,
                      double tau) {
  if (dalpha.degree() < 1) throw KernelError("kernel_of: form must have degree >= 1");
  const int n = dalpha.dim();
  KernelFrame f;
  Matrix a = interior_matrix(dalpha);
  Eigen::JacobiSVD<Matrix> svd_form(a);
  const Vector sv = svd_form.singularValues();
  f.singular_values.assign(sv.data(), sv.data() + sv.size());
  const double smax = sv.size() ? sv[0] : 0.0;
  f.degenerate = smax < kDegenerateThreshold;
  f.rank_form = 0;
  if (!f.degenerate)
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv[i] > tau * smax) ++f.rank_form;
  if (f.degenerate) a.setZero();

  Matrix stacked(a.rows() + static_cast<Eigen::Index>(constraints.size()), n);
  stacked.topRows(a.rows()) = a;
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    if (constraints[i].degree() != 1 || constraints[i].dim() != n)
      throw KernelError("kernel_of: constraints must be 1-forms on the same space");
    stacked.row(a.rows() + static_cast<Eigen::Index>(i)) = constraints[i].comps().transpose();
  }
  Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeFullV);
  const Vector s = svd.singularValues();
  const double top = s.size() ? s[0] : 0.0;
  int rank = 0;
  if (top > 0.0)
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s[i] > tau * top) ++rank;
  f.constraint_rank = rank - f.rank_form;
  f.basis = svd.matrixV().rightCols(n - rank);
  return f;
}

KernelFrame kernel_at(const DifferentialForm& dalpha, const Point& x,
                      const Constraints& constraints, double tau) {
  std::vector<AltTensord> cs;
  cs.reserve(constraints.size());
  for (const auto& c : constraints) cs.push_back(c(x));
  KernelFrame f = kernel_of(dalpha(x), cs, tau);
  f.point = x;
  return f;
}

DimensionReport dimension_report(const DifferentialForm& dalpha, const std::vector<Point>& points,
                                 const Constraints& constraints, double tau) {
  DimensionReport r;
  r.ambient_dim = dalpha.dim();
  r.form_degree = dalpha.degree();
  r.points = points;
  int constraint_rank = 0;
  for (const Point& x : points) {
    const KernelFrame f = kernel_at(dalpha, x, constraints, tau);
    r.ranks.push_back(f.rank_form);
    r.kernel_dims.push_back(f.dim());
    r.spectra.push_back(f.singular_values);
    constraint_rank = std::max(constraint_rank, f.constraint_rank);
  }
  if (points.empty()) return r;
  r.rank = r.ranks.front();
  r.dim_d = r.kernel_dims.front();
  r.constant_rank = std::all_of(r.ranks.begin(), r.ranks.end(), [&](int k) { return k == r.rank; });
  r.bound = r.ambient_dim - r.form_degree - constraint_rank;
  r.bound_satisfied =
      std::all_of(r.kernel_dims.begin(), r.kernel_dims.end(), [&](int d) { return d <= r.bound; });
  r.bound_equality =
      std::all_of(r.kernel_dims.begin(), r.kernel_dims.end(), [&](int d) { return d == r.bound; });
  return r;
}

KernelFrameField::KernelFrameField(DifferentialForm dalpha, const Point& seed,
                                   Constraints constraints, double tau)
    : dalpha_(std::move(dalpha)), constraints_(std::move(constraints)), tau_(tau) {
  const KernelFrame f = kernel_at(dalpha_, seed, constraints_, tau_);
  if (f.degenerate) throw KernelError("kernel frame: form vanishes at seed " + format_point(seed));
  seed_basis_ = f.basis;
}

Matrix KernelFrameField::operator()(const Point& y) const {
  const KernelFrame f = kernel_at(dalpha_, y, constraints_, tau_);
  if (f.degenerate) throw KernelError("kernel frame: form vanishes at " + format_point(y));
  if (f.dim() != dim())
    throw KernelError("kernel frame: rank change near " + format_point(y) + " (dim D " +
                      std::to_string(f.dim()) + " vs " + std::to_string(dim()) + ")");
  return orthonormalize_in_order(f.basis * (f.basis.transpose() * seed_basis_));
}

VectorField KernelFrameField::column(int j) const {
  const KernelFrameField self = *this;
  return VectorField(
      dalpha_.dim(), dalpha_.extended(), dalpha_.domain(),
      [self, j](const Point& y) -> Vector { return self(y).col(j); },
      "frame" + std::to_string(j) + "(" + dalpha_.description() + ")");
}

VectorField kernel_field(const DifferentialForm& dalpha, const Vector& hint,
                         const Constraints& constraints, double tau) {
  if (hint.size() != dalpha.dim()) throw KernelError("kernel_field: hint dimension mismatch");
  return VectorField(
      dalpha.dim(), dalpha.extended(), dalpha.domain(),
      [dalpha, hint, constraints, tau](const Point& y) -> Vector {
        const KernelFrame f = kernel_at(dalpha, y, constraints, tau);
        if (f.degenerate) throw KernelError("kernel_field: form vanishes at " + format_point(y));
        const Vector w = f.basis * (f.basis.transpose() * hint);
        const double nrm = w.norm();
        if (nrm < 1e-8 * hint.norm())
          throw KernelError("kernel_field: hint is orthogonal to D at " + format_point(y));
        return w / nrm;
      },
      "ker(" + dalpha.description() + ")");
}

double frobenius_residual(const DifferentialForm& dalpha, const Point& x,
                          const Constraints& constraints, double tau) {
  const KernelFrameField frame(dalpha, x, constraints, tau);
  const int m = frame.dim();
  if (m <= 1) return 0.0;
  const int n = dalpha.dim();
  const Matrix w = frame(x);
  // derivatives of each frame column: dw[j](:, l) = ∂_l w_j
  std::vector<Matrix> dw(m, Matrix(n, n));
  for (int l = 0; l < n; ++l) {
    Point xp = x, xm = x;
    const double h = fd_step(x[l]);
    xp[l] += h;
    xm[l] -= h;
    const Matrix diff = (frame(xp) - frame(xm)) / (xp[l] - xm[l]);
    for (int j = 0; j < m; ++j) dw[j].col(l) = diff.col(j);
  }
  const Matrix proj = Matrix::Identity(n, n) - w * w.transpose();
  double worst = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const Vector bracket = dw[j] * w.col(i) - dw[i] * w.col(j);
      worst = std::max(worst, (proj * bracket).norm());
    }
  return worst;
}

namespace {

struct KernelDirection {
  bool ok = false;
  Vector dir;
  std::string reason;
};

KernelDirection unit_kernel(const DifferentialForm& dalpha, const Point& y, const Vector& ref,
                            const TraceOptions& opts) {
  KernelDirection r;
  KernelFrame f;
  try {
    f = kernel_at(dalpha, y, opts.constraints, opts.tau);
  } catch (const DomainError& e) {
    r.reason = std::string("left domain: ") + e.what();
    return r;
  }
  if (f.degenerate) {
    r.reason = "form vanishes at " + format_point(y);
    return r;
  }
  if (f.dim() != 1) {
    r.reason = "kernel dimension " + std::to_string(f.dim()) + " at " + format_point(y);
    return r;
  }
  r.dir = f.basis.col(0);
  if (r.dir.dot(ref) < 0.0) r.dir = -r.dir;
  r.ok = true;
  return r;
}

double node_residual(const DifferentialForm& dalpha, const Point& x, const Vector& t) {
  return annihilation_residual(dalpha(x), t);
}

}  // namespace

VortexLine trace_vortex_line(const DifferentialForm& dalpha, const Point& seed, double length,
                             int direction, const TraceOptions& opts) {
  if (opts.step <= 0.0) throw KernelError("trace_vortex_line: step must be positive");
  const KernelFrame f0 = kernel_at(dalpha, seed, opts.constraints, opts.tau);
  if (f0.degenerate)
    throw KernelError("trace_vortex_line: form vanishes at seed " + format_point(seed) +
                      " (zero vorticity)");
  if (f0.dim() != 1)
    throw KernelError("trace_vortex_line: kernel dimension " + std::to_string(f0.dim()) +
                      " at seed " + format_point(seed) + ", need 1");
  Vector t0 = f0.basis.col(0);
  if (opts.orientation) {
    if (t0.dot(*opts.orientation) < 0.0) t0 = -t0;
  } else {
    Eigen::Index imax;
    t0.cwiseAbs().maxCoeff(&imax);
    if (t0[imax] < 0.0) t0 = -t0;
  }
  if (direction < 0) t0 = -t0;

  VortexLine line;
  line.nodes.push_back(seed);
  line.arc.push_back(0.0);
  line.tangents.push_back(t0);
  line.node_residuals.push_back(node_residual(dalpha, seed, t0));

  const int steps = static_cast<int>(std::ceil(length / opts.step - 1e-9));
  Point x = seed;
  Vector prev = t0;
  for (int s = 0; s < steps; ++s) {
    const double s0 = s * opts.step;
    const double h = std::min(opts.step, length - s0);
    const KernelDirection k1 = unit_kernel(dalpha, x, prev, opts);
    KernelDirection k2, k3, k4;
    if (k1.ok) k2 = unit_kernel(dalpha, x + 0.5 * h * k1.dir, k1.dir, opts);
    if (k2.ok) k3 = unit_kernel(dalpha, x + 0.5 * h * k2.dir, k2.dir, opts);
    if (k3.ok) k4 = unit_kernel(dalpha, x + h * k3.dir, k3.dir, opts);
    if (!k4.ok) {
      line.complete = false;
      line.stop_reason = !k1.ok ? k1.reason : !k2.ok ? k2.reason : !k3.ok ? k3.reason : k4.reason;
      break;
    }
    const Point xn = x + (h / 6.0) * (k1.dir + 2.0 * k2.dir + 2.0 * k3.dir + k4.dir);
    const KernelDirection kn = unit_kernel(dalpha, xn, k4.dir, opts);
    if (!kn.ok) {
      line.complete = false;
      line.stop_reason = kn.reason;
      break;
    }
    x = xn;
    prev = kn.dir;
    line.nodes.push_back(x);
    line.arc.push_back(s0 + h);
    line.tangents.push_back(prev);
    line.node_residuals.push_back(node_residual(dalpha, x, prev));
  }
  line.residual = *std::max_element(line.node_residuals.begin(), line.node_residuals.end());
  return line;
}

double distance_to_curve(const Point& p, const std::vector<Point>& nodes,
                         const std::vector<Vector>& tangents) {
  double best = std::numeric_limits<double>::infinity();
  for (const Point& q : nodes) best = std::min(best, (p - q).norm());
  constexpr int kRefine = 8;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const Point& a = nodes[i];
    const Point& b = nodes[i + 1];
    const double chord = (b - a).norm();
    if (chord == 0.0) continue;
    // cheap reject
    if ((p - a).norm() > best + 2.0 * chord) continue;
    const bool hermite = tangents.size() == nodes.size();
    Point prev = a;
    for (int r = 1; r <= kRefine; ++r) {
      const double s = double(r) / kRefine;
      Point cur;
      if (r == kRefine) {
        cur = b;
      } else if (hermite) {
        const double h00 = 2 * s * s * s - 3 * s * s + 1, h10 = s * s * s - 2 * s * s + s;
        const double h01 = -2 * s * s * s + 3 * s * s, h11 = s * s * s - s * s;
        cur = h00 * a + h10 * chord * tangents[i] + h01 * b + h11 * chord * tangents[i + 1];
      } else {
        cur = a + s * (b - a);
      }
      const Vector seg = cur - prev;
      const double len2 = seg.squaredNorm();
      double lam = len2 > 0.0 ? (p - prev).dot(seg) / len2 : 0.0;
      lam = std::clamp(lam, 0.0, 1.0);
      best = std::min(best, (p - (prev + lam * seg)).norm());
      prev = cur;
    }
  }
  return best;
}

LineMotionReport check_lines_move_with_fluid(const VectorField& v, const DifferentialForm& dalpha,
                                             const Point& seed, double t,
                                             const LineMotionOptions& opts) {
  LineMotionReport rep;
  // Whole number of steps so that, at t = 0, path A's nodes are nodes of path B.
  const double step = opts.trace.step;
  const double length = std::max(1, static_cast<int>(std::round(opts.length / step))) * step;
  rep.original = trace_vortex_line(dalpha, seed, length, 1, opts.trace);
  if (!rep.original.complete)
    throw KernelError("check_lines_move_with_fluid: line through seed stopped early: " +
                      rep.original.stop_reason);

  const DifferentialForm lie = lie_derivative(v, dalpha);
  const std::size_t nn = rep.original.nodes.size();
  for (std::size_t i : {std::size_t(0), nn / 2, nn - 1}) {
    const Point& x = rep.original.nodes[i];
    const double scale = std::max(1.0, dalpha(x).norm());
    rep.lie_residual = std::max(rep.lie_residual, lie(x).max_abs() / scale);
  }
  if (rep.lie_residual > opts.lie_tol)
    throw KernelError("form not Lie-invariant: max |L_v dα| / |dα| = " +
                      std::to_string(rep.lie_residual) + " exceeds " + std::to_string(opts.lie_tol));

  std::vector<Vector> pushed_tangents;
  double image_length = 0.0;
  for (std::size_t i = 0; i < nn; ++i) {
    const Point& x = rep.original.nodes[i];
    const Vector& tan = rep.original.tangents[i];
    const Point y = advect_point(v, x, t, opts.stepper);
    const double h = 1e-5 * std::max(1.0, x.norm());
    const Vector pushed =
        (advect_point(v, x + h * tan, t, opts.stepper) - advect_point(v, x - h * tan, t, opts.stepper)) /
        (2.0 * h);
    if (!rep.advected.empty()) image_length += (y - rep.advected.back()).norm();
    rep.advected.push_back(y);
    pushed_tangents.push_back(pushed);
    rep.residual = std::max(rep.residual, annihilation_residual(dalpha(y), pushed));
  }

  TraceOptions retrace = opts.trace;
  retrace.orientation = pushed_tangents.front();
  const double length_b = std::ceil((1.05 * image_length + 5.0 * step) / step) * step;
  rep.retraced = trace_vortex_line(dalpha, rep.advected.front(), length_b, 1, retrace);
  for (const Point& y : rep.advected)
    rep.hausdorff =
        std::max(rep.hausdorff, distance_to_curve(y, rep.retraced.nodes, rep.retraced.tangents));
  return rep;
}

TubeReport check_tube_strength(const DifferentialForm& dalpha, const TubeSpec& tube, double s,
                               double tol, const Constraints& constraints,
                               const Stepper& stepper) {
  TubeReport r;
  r.tolerance = tol;
  const Chain& s1 = tube.transversal;
  if (s1.degree() != dalpha.degree())
    throw KernelError("check_tube_strength: transversal degree must equal the degree of dα");
  if (tube.seed_cycle.degree() + 1 != s1.degree())
    throw KernelError("check_tube_strength: seed cycle must have degree one less than transversal");

  // c1 = ∂S1, checked on probe forms
  const Chain bd = boundary(s1);
  for (const auto& probe : probe_forms(dalpha.domain(), tube.seed_cycle.degree(), 3, 0x7b1e,
                                       dalpha.extended()))
    r.boundary_mismatch = std::max(
        r.boundary_mismatch, std::abs(integrate(probe, tube.seed_cycle) - integrate(probe, bd)));
  if (r.boundary_mismatch > 1e-9)
    throw KernelError("check_tube_strength: seed cycle is not the boundary of the transversal");

  // sample S1 at cell midpoints and corners
  std::vector<Point> samples;
  for (const Cell& c : s1.cells()) {
    const int k = c.degree;
    const int count = 1 << k;
    for (int mask = 0; mask < count; ++mask) {
      Vector u(k);
      for (int j = 0; j < k; ++j) u[j] = (mask >> j) & 1 ? 0.9 : 0.1;
      samples.push_back(c(u));
    }
    samples.push_back(c(Vector::Constant(k, 0.5)));
  }
  int rank = -1;
  auto check_rank = [&](const Point& x) {
    const KernelFrame f = kernel_at(dalpha, x, constraints);
    if (rank < 0) rank = f.rank_form;
    if (f.rank_form != rank)
      throw KernelError("check_tube_strength: rank change inside tube at " + format_point(x));
  };
  for (const Point& x : samples) {
    check_rank(x);
    r.kernel_residual = std::max(r.kernel_residual, annihilation_residual(dalpha(x), tube.along(x)));
  }
  if (r.kernel_residual > 1e-6)
    throw KernelError("check_tube_strength: field W does not annihilate dα (residual " +
                      std::to_string(r.kernel_residual) + ")");
  for (const Point& x : samples) check_rank(advect_point(tube.along, x, s, stepper));

  r.end_section = advect_chain(tube.along, s1, s, stepper);
  r.flux_start = integrate(dalpha, s1);
  r.flux_end = integrate(dalpha, r.end_section);
  r.difference = std::abs(r.flux_end - r.flux_start);
  r.passed = r.difference < tol;
  return r;
}

SurfaceMesh trace_integral_surface(const DifferentialForm& dalpha, const Point& seed, double extent,
                                   const SurfaceOptions& opts) {
  SurfaceMesh mesh;
  const KernelFrame f0 = kernel_at(dalpha, seed, opts.constraints, opts.tau);
  if (f0.degenerate) throw KernelError("trace_integral_surface: form vanishes at seed");
  mesh.dim = f0.dim();
  if (mesh.dim == 0) throw KernelError("trace_integral_surface: D is zero-dimensional at seed");

  if (mesh.dim == 1) {
    TraceOptions to;
    to.step = opts.step;
    to.tau = opts.tau;
    to.constraints = opts.constraints;
    to.orientation = opts.orientation;
    const VortexLine line = trace_vortex_line(dalpha, seed, extent, 1, to);
    mesh.shape = {static_cast<int>(line.nodes.size())};
    for (std::size_t i = 0; i < line.nodes.size(); ++i) {
      mesh.params.push_back(Vector::Constant(1, line.arc[i]));
      mesh.points.push_back(line.nodes[i]);
      mesh.tangents.push_back({line.tangents[i]});
      mesh.residuals.push_back(line.node_residuals[i]);
    }
    mesh.max_residual = line.residual;
    mesh.complete = line.complete;
    mesh.stop_reason = line.stop_reason;
    return mesh;
  }

  const int m = mesh.dim;
  const int n_axis = std::max(2, opts.nodes_per_axis);
  const double delta = extent / (n_axis - 1);
  const KernelFrameField frame(dalpha, seed, opts.constraints, opts.tau);
  std::vector<VectorField> fields;
  for (int j = 0; j < m; ++j) fields.push_back(frame.column(j));
  const Stepper stepper{opts.step, 1};
  mesh.shape.assign(m, n_axis);

  // flows of fields j+1..m-1 by the given parameters
  auto remaining = [&](Point p, const Vector& params, int from) {
    for (int j = from; j < m; ++j) p = advect_point(fields[j], p, params[j], stepper);
    return p;
  };

  try {
    // levels[j] holds points after the first j+1 flows, in lexicographic order
    std::vector<std::vector<Point>> levels(m);
    std::vector<Point> current = {seed};
    for (int j = 0; j < m; ++j) {
      std::vector<Point> next;
      next.reserve(current.size() * n_axis);
      for (const Point& p : current) {
        Point q = p;
        next.push_back(q);
        for (int i = 1; i < n_axis; ++i) {
          q = advect_point(fields[j], q, delta, stepper);
          next.push_back(q);
        }
      }
      levels[j] = next;
      current = std::move(next);
    }
    const std::size_t total = current.size();
    for (std::size_t node = 0; node < total; ++node) {
      Vector params(m);
      std::vector<std::size_t> level_index(m);
      std::size_t rem = node;
      for (int j = m - 1; j >= 0; --j) {
        params[j] = delta * static_cast<double>(rem % n_axis);
        rem /= n_axis;
      }
      // index of the node's ancestor at level j
      for (int j = 0; j < m; ++j) {
        std::size_t idx = 0;
        for (int q = 0; q <= j; ++q) idx = idx * n_axis + static_cast<std::size_t>(std::lround(params[q] / delta));
        level_index[j] = idx;
      }
      const Point& x = current[node];
      std::vector<Vector> tans;
      for (int j = 0; j < m; ++j) {
        const Point& pj = levels[j][level_index[j]];
        const Vector wj = fields[j](pj);
        if (j == m - 1) {
          tans.push_back(wj);
          continue;
        }
        const double h = 1e-5 * std::max(1.0, pj.norm());
        tans.push_back((remaining(pj + h * wj, params, j + 1) - remaining(pj - h * wj, params, j + 1)) /
                       (2.0 * h));
      }
      const AltTensord da = dalpha(x);
      double res = 0.0;
      for (const Vector& t : tans) res = std::max(res, annihilation_residual(da, t));
      mesh.params.push_back(params);
      mesh.points.push_back(x);
      mesh.tangents.push_back(std::move(tans));
      mesh.residuals.push_back(res);
      mesh.max_residual = std::max(mesh.max_residual, res);
    }
  } catch (const KernelError& e) {
    mesh.complete = false;
    mesh.stop_reason = e.what();
  } catch (const DomainError& e) {
    mesh.complete = false;
    mesh.stop_reason = e.what();
  }
  return mesh;
}

SurfaceMesh advect_surface(const SurfaceMesh& mesh, const VectorField& v, double t,
                           const DifferentialForm& dalpha, const Stepper& stepper) {
  SurfaceMesh out = mesh;
  out.max_residual = 0.0;
  for (std::size_t i = 0; i < mesh.points.size(); ++i) {
    const Point& x = mesh.points[i];
    out.points[i] = advect_point(v, x, t, stepper);
    const AltTensord da = dalpha(out.points[i]);
    double res = 0.0;
    for (std::size_t j = 0; j < mesh.tangents[i].size(); ++j) {
      const Vector& tan = mesh.tangents[i][j];
      const double h = 1e-5 * std::max(1.0, x.norm()) / std::max(1e-12, tan.norm());
      out.tangents[i][j] =
          (advect_point(v, x + h * tan, t, stepper) - advect_point(v, x - h * tan, t, stepper)) /
          (2.0 * h);
      res = std::max(res, annihilation_residual(da, out.tangents[i][j]));
    }
    out.residuals[i] = res;
    out.max_residual = std::max(out.max_residual, res);
  }
  return out;
}

double max_principal_angle(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) return std::numbers::pi / 2;
  if (a.cols() == 0) return 0.0;
  const Matrix pa = b - a * (a.transpose() * b);
  const Matrix pb = a - b * (b.transpose() * a);
  const double s = std::max(pa.jacobiSvd().singularValues()[0], pb.jacobiSvd().singularValues()[0]);
  return std::asin(std::min(1.0, s));
}

}  // namespace cartan
