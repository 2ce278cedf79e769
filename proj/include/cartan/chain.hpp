// Parametrized cube chains, their boundary, and Gauss-Legendre integration of
// forms over them.
#ifndef CARTAN_CHAIN_HPP_
#define CARTAN_CHAIN_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "cartan/forms.hpp"

namespace cartan {

inline constexpr int kDefaultQuadOrder = 12;
inline constexpr double kTangentStep = 1e-5;

/// A map [0,1]^k -> R^n with an integer multiplicity.
struct Cell {
  using Map = std::function<Point(const Vector& u)>;

  int degree = 0;
  Map map;
  int weight = 1;
  int quad_order = kDefaultQuadOrder;

  Point operator()(const Vector& u) const { return map(u); }
};

class Chain {
 public:
  Chain() = default;
  Chain(int ambient_dim, int degree, bool extended = false)
      : ambient_dim_(ambient_dim), degree_(degree), extended_(extended) {}

  int ambient_dim() const { return ambient_dim_; }
  int degree() const { return degree_; }
  bool extended() const { return extended_; }
  const std::vector<Cell>& cells() const { return cells_; }
  bool empty() const { return cells_.empty(); }

  Chain& add(Cell c);
  Chain& append(const Chain& other, int sign = 1);

  /// Same chain with every cell at the given quadrature order.
  Chain with_quad_order(int order) const;
  /// Every cell map composed with f.
  Chain mapped(const std::function<Point(const Point&)>& f) const;
  Chain negated() const { return Chain(ambient_dim_, degree_, extended_).append(*this, -1); }

 private:
  int ambient_dim_ = 0;
  int degree_ = 0;
  bool extended_ = false;
  std::vector<Cell> cells_;
};

struct Quadrature {
  std::vector<double> nodes;    // on [0, 1]
  std::vector<double> weights;  // sum to 1
};

/// Gauss-Legendre rule on [0, 1] with n nodes.
Quadrature gauss_legendre(int n);

/// Sum over cells of the tensor-product quadrature of a(∂_1 map, ..., ∂_k map).
double integrate(const DifferentialForm& a, const Chain& c);

/// Alternating-face boundary with induced orientations.
Chain boundary(const Chain& c);

// --- builders --------------------------------------------------------------

/// Point as a 0-chain.
Chain point_chain(const Point& x, int weight = 1, bool extended = false);
Chain segment(const Point& a, const Point& b, bool extended = false);
/// Circle x = c + r (cos θ e1 + sin θ e2), split into equal arcs.
Chain circle(const Point& center, double radius, const Vector& e1, const Vector& e2,
             int arcs = 8, bool extended = false);
/// Disc spanned by e1, e2, oriented so its boundary is circle(center, radius, e1, e2).
Chain disc(const Point& center, double radius, const Vector& e1, const Vector& e2, int sectors = 8,
           bool extended = false);
/// Parallelotope origin + sum u_j edges_j (edges as matrix columns).
Chain parallelotope(const Point& origin, const Matrix& edges, bool extended = false);
/// Single cell from an arbitrary map.
Chain cell_chain(int ambient_dim, int degree, Cell::Map map, bool extended = false);

// --- cycle probing ---------------------------------------------------------

/// Deterministic random polynomial k-forms (quadratic components) for probing.
std::vector<DifferentialForm> probe_forms(const Domain& domain, int degree, int count,
                                          std::uint64_t seed, bool extended = false);

struct CycleProbe {
  bool is_cycle = true;
  double max_boundary_integral = 0.0;
  int failed_probe = -1;  // index of the first probe above tolerance
  std::string failed_description;
};

/// Integrates probe forms over ∂c; c is declared a cycle if all vanish.
CycleProbe probe_cycle(const Chain& c, const Domain& domain, double tol = 1e-9, int probes = 4,
                       std::uint64_t seed = 0x5eed);

}  // namespace cartan

#endif  // CARTAN_CHAIN_HPP_
