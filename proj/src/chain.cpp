#include "cartan/chain.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace cartan {

Chain& Chain::add(Cell c) {
  if (c.degree != degree_)
    throw TensorError("Chain::add: cell degree " + std::to_string(c.degree) +
                      " does not match chain degree " + std::to_string(degree_));
  if (c.weight == 0) throw TensorError("Chain::add: cell weight must be nonzero");
  if (c.quad_order < 1) throw TensorError("Chain::add: quadrature order must be >= 1");
  cells_.push_back(std::move(c));
  return *this;
}

Chain& Chain::append(const Chain& other, int sign) {
  if (other.degree_ != degree_ || other.ambient_dim_ != ambient_dim_)
    throw TensorError("Chain::append: incompatible chains");
  for (Cell c : other.cells_) {
    c.weight *= sign;
    add(std::move(c));
  }
  return *this;
}

Chain Chain::with_quad_order(int order) const {
  Chain out(ambient_dim_, degree_, extended_);
  for (Cell c : cells_) {
    c.quad_order = order;
    out.add(std::move(c));
  }
  return out;
}

Chain Chain::mapped(const std::function<Point(const Point&)>& f) const {
  Chain out(ambient_dim_, degree_, extended_);
  for (const Cell& c : cells_) {
    Cell m = c;
    m.map = [inner = c.map, f](const Vector& u) { return f(inner(u)); };
    out.add(std::move(m));
  }
  return out;
}

Quadrature gauss_legendre(int n) {
  if (n < 1) throw TensorError("gauss_legendre: order must be >= 1");
  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  // Newton iteration on P_n from the Chebyshev-like initial guess.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = (n == 1) ? x : p1;
      const double pnm1 = (n == 1) ? 1.0 : p0;
      dp = n * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // map [-1,1] -> [0,1]
    q.nodes[i] = 0.5 * (1.0 - x);
    q.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    q.weights[i] = q.weights[n - 1 - i] = 0.5 * w;
  }
  return q;
}

namespace {

double integrate_cell(const DifferentialForm& a, const Cell& cell) {
  const int k = cell.degree;
  if (k == 0) return cell.weight * a(cell.map(Vector(0))).value();
  const Quadrature q = gauss_legendre(cell.quad_order);
  const int n = cell.quad_order;
  std::vector<int> idx(k, 0);
  Vector u(k);
  Matrix tangents(a.dim(), k);
  double total = 0.0;
  while (true) {
    double w = 1.0;
    for (int j = 0; j < k; ++j) {
      u[j] = q.nodes[idx[j]];
      w *= q.weights[idx[j]];
    }
    const Point x = cell.map(u);
    for (int j = 0; j < k; ++j) {
      Vector up = u, um = u;
      up[j] += kTangentStep;
      um[j] -= kTangentStep;
      tangents.col(j) = (cell.map(up) - cell.map(um)) / (up[j] - um[j]);
    }
    total += w * eval_on_vectors(a(x), tangents);
    int j = 0;
    while (j < k && ++idx[j] == n) idx[j++] = 0;
    if (j == k) break;
  }
  return cell.weight * total;
}

}  // namespace

double integrate(const DifferentialForm& a, const Chain& c) {
  if (a.degree() != c.degree())
    throw TensorError("integrate: form '" + a.description() + "' has degree " +
                      std::to_string(a.degree()) + " but chain has degree " +
                      std::to_string(c.degree()));
  if (a.dim() != c.ambient_dim()) throw TensorError("integrate: dimension mismatch");
  double total = 0.0;
  for (const Cell& cell : c.cells()) total += integrate_cell(a, cell);
  return total;
}

Chain boundary(const Chain& c) {
  if (c.degree() < 1) throw TensorError("boundary: a 0-chain has no boundary");
  const int k = c.degree();
  Chain out(c.ambient_dim(), k - 1, c.extended());
  for (const Cell& cell : c.cells()) {
    for (int j = 0; j < k; ++j) {
      for (int e = 0; e <= 1; ++e) {
        // (-1)^{j+e} with 1-based j
        const int sign = ((j + 1 + e) % 2) ? -1 : 1;
        Cell face;
        face.degree = k - 1;
        face.weight = sign * cell.weight;
        face.quad_order = cell.quad_order;
        face.map = [inner = cell.map, j, e, k](const Vector& v) {
          Vector u(k);
          for (int q = 0, r = 0; q < k; ++q) u[q] = (q == j) ? double(e) : v[r++];
          return inner(u);
        };
        out.add(std::move(face));
      }
    }
  }
  return out;
}

Chain point_chain(const Point& x, int weight, bool extended) {
  Chain c(static_cast<int>(x.size()), 0, extended);
  c.add({0, [x](const Vector&) { return x; }, weight, 1});
  return c;
}

Chain segment(const Point& a, const Point& b, bool extended) {
  Chain c(static_cast<int>(a.size()), 1, extended);
  c.add({1, [a, b](const Vector& u) -> Point { return a + u[0] * (b - a); }});
  return c;
}

Chain circle(const Point& center, double radius, const Vector& e1, const Vector& e2, int arcs,
             bool extended) {
  Chain c(static_cast<int>(center.size()), 1, extended);
  const double span = 2.0 * std::numbers::pi / arcs;
  for (int i = 0; i < arcs; ++i) {
    const double th0 = i * span;
    c.add({1, [=](const Vector& u) -> Point {
             const double th = th0 + span * u[0];
             return center + radius * (std::cos(th) * e1 + std::sin(th) * e2);
           }});
  }
  return c;
}

Chain disc(const Point& center, double radius, const Vector& e1, const Vector& e2, int sectors,
           bool extended) {
  Chain c(static_cast<int>(center.size()), 2, extended);
  const double span = 2.0 * std::numbers::pi / sectors;
  for (int i = 0; i < sectors; ++i) {
    const double th0 = i * span;
    c.add({2, [=](const Vector& u) -> Point {
             const double th = th0 + span * u[1];
             return center + radius * u[0] * (std::cos(th) * e1 + std::sin(th) * e2);
           }});
  }
  return c;
}

Chain parallelotope(const Point& origin, const Matrix& edges, bool extended) {
  const int k = static_cast<int>(edges.cols());
  Chain c(static_cast<int>(origin.size()), k, extended);
  c.add({k, [origin, edges](const Vector& u) -> Point { return origin + edges * u; }});
  return c;
}

Chain cell_chain(int ambient_dim, int degree, Cell::Map map, bool extended) {
  Chain c(ambient_dim, degree, extended);
  c.add({degree, std::move(map)});
  return c;
}

std::vector<DifferentialForm> probe_forms(const Domain& domain, int degree, int count,
                                          std::uint64_t seed, bool extended) {
  const int n = domain.dim();
  const int ncomp = static_cast<int>(binomial(n, degree));
  // constant + linear + quadratic monomials per component
  const int nmono = 1 + n + n * (n + 1) / 2;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::vector<DifferentialForm> out;
  for (int p = 0; p < count; ++p) {
    Matrix c(ncomp, nmono);
    for (int i = 0; i < ncomp; ++i)
      for (int j = 0; j < nmono; ++j) c(i, j) = coef(rng);
    out.emplace_back(
        n, degree, extended, domain,
        [c, n, degree](const Point& x) {
          Vector mono(c.cols());
          int m = 0;
          mono[m++] = 1.0;
          for (int i = 0; i < n; ++i) mono[m++] = x[i];
          for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) mono[m++] = x[i] * x[j];
          return AltTensord(n, degree, c * mono);
        },
        "probe" + std::to_string(p));
  }
  return out;
}

CycleProbe probe_cycle(const Chain& c, const Domain& domain, double tol, int probes,
                       std::uint64_t seed) {
  CycleProbe r;
  if (c.degree() < 1) return r;  // every 0-chain is a cycle
  const Chain bd = boundary(c);
  const auto forms = probe_forms(domain, c.degree() - 1, probes, seed, c.extended());
  for (std::size_t i = 0; i < forms.size(); ++i) {
    const double v = std::abs(integrate(forms[i], bd));
    r.max_boundary_integral = std::max(r.max_boundary_integral, v);
    if (v > tol && r.is_cycle) {
      r.is_cycle = false;
      r.failed_probe = static_cast<int>(i);
      r.failed_description = forms[i].description();
    }
  }
  return r;
}

}  // namespace cartan
