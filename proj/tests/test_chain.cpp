#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cartan/chain.hpp"
#include "support.hpp"

using namespace cartan;
using namespace cartan::testing;

TEST_CASE("Gauss-Legendre rule") {
  for (int n : {1, 2, 5, 12, 20}) {
    const Quadrature q = gauss_legendre(n);
    double wsum = 0.0;
    for (double w : q.weights) wsum += w;
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
    // exact for polynomials up to degree 2n - 1
    double integral = 0.0;
    for (int i = 0; i < n; ++i) integral += q.weights[i] * std::pow(q.nodes[i], 2 * n - 1);
    CHECK(integral == doctest::Approx(1.0 / (2 * n)).epsilon(1e-13));
  }
  CHECK_THROWS(gauss_legendre(0));
}

TEST_CASE("integration of basic forms") {
  const Domain dom(2, 10.0);
  const auto area = wedge(coordinate_differential(0, dom), coordinate_differential(1, dom));
  const Chain square = parallelotope(make_point({0, 0}), Matrix::Identity(2, 2));
  SUBCASE("unit square area") { CHECK(std::abs(integrate(area, square) - 1.0) < 1e-12); }
  SUBCASE("exact forms vanish on loops") {
    const auto f = scalar_field(2, false, dom, [](const Point& x) { return std::sin(x[0]) * x[1] * x[1]; }, "f");
    const Chain loop = circle(make_point({0.2, 0.1}), 0.8, make_vec({1, 0}), make_vec({0, 1}));
    CHECK(std::abs(integrate(d(f), loop)) < 1e-8);
  }
  SUBCASE("circulation of rigid rotation") {
    const Chain c = circle(make_point({0, 0, 0}), 1.0, make_vec({1, 0, 0}), make_vec({0, 1, 0}));
    CHECK(std::abs(integrate(flat(rotation_field()), c) - 2 * std::numbers::pi) < 1e-8);
  }
  SUBCASE("0-forms over 0-chains are signed point values") {
    const auto f = scalar_field(2, false, dom, [](const Point& x) { return x[0] + 2 * x[1]; }, "f");
    Chain c = point_chain(make_point({1, 1}));
    c.append(point_chain(make_point({0, 1}), -1));
    CHECK(integrate(f, c) == doctest::Approx(1.0));
  }
  SUBCASE("degree mismatch") {
    CHECK_THROWS(integrate(coordinate_differential(0, dom), square));
  }
}

TEST_CASE("boundary operator") {
  const Domain dom(3, 10.0);
  SUBCASE("square has four edges and dx integrates to zero") {
    const Chain sq = parallelotope(make_point({0, 0}), Matrix::Identity(2, 2));
    const Chain b = boundary(sq);
    CHECK(b.cells().size() == 4);
    CHECK(std::abs(integrate(coordinate_differential(0, Domain(2, 10.0)), b)) < 1e-14);
  }
  SUBCASE("boundary of boundary of a cube") {
    const Chain cube = parallelotope(make_point({0, 0, 0}), Matrix::Identity(3, 3));
    const Chain bb = boundary(boundary(cube));
    for (const auto& probe : probe_forms(dom, 1, 5, 99)) CHECK(std::abs(integrate(probe, bb)) < 1e-9);
  }
  SUBCASE("disc boundary is its circle") {
    const Chain dsc = disc(make_point({0, 0, 0}), 0.5, make_vec({1, 0, 0}), make_vec({0, 1, 0}));
    const Chain c = circle(make_point({0, 0, 0}), 0.5, make_vec({1, 0, 0}), make_vec({0, 1, 0}));
    for (const auto& probe : probe_forms(dom, 1, 4, 1))
      CHECK(std::abs(integrate(probe, boundary(dsc)) - integrate(probe, c)) < 1e-9);
  }
  SUBCASE("0-chains have no boundary") {
    CHECK_THROWS(boundary(point_chain(make_point({0, 0, 0}))));
  }
}

TEST_CASE("Stokes on curved cells") {
  std::mt19937_64 rng(13);
  const Chain cell = cell_chain(3, 2, [](const Vector& u) {
    return make_point({u[0] + 0.3 * u[1] * u[1], u[1] - 0.2 * std::sin(u[0]), 0.5 * u[0] * u[1]});
  });
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = random_form(3, 1, rng);
    const double lhs = integrate(d(a), cell);
    const double rhs = integrate(a, boundary(cell));
    CHECK(std::abs(lhs - rhs) < 1e-6);
  }
}

TEST_CASE("quadrature convergence") {
  std::mt19937_64 rng(17);
  const auto a = random_form(3, 2, rng);
  const Chain dsc = disc(make_point({0.1, 0, 0}), 0.7, make_vec({1, 0, 0}), make_vec({0, 0.6, 0.8}));
  CHECK(std::abs(integrate(a, dsc) - integrate(a, dsc.with_quad_order(24))) < 1e-8);
}

TEST_CASE("cycle probing") {
  const Domain dom(3, 10.0);
  const Chain c = circle(make_point({0, 0, 0}), 1.0, make_vec({1, 0, 0}), make_vec({0, 1, 0}));
  CHECK(probe_cycle(c, dom).is_cycle);
  const CycleProbe open = probe_cycle(segment(make_point({0, 0, 0}), make_point({1, 0, 0})), dom);
  CHECK_FALSE(open.is_cycle);
  CHECK(open.failed_probe == 0);
  CHECK_FALSE(open.failed_description.empty());
}

TEST_CASE("chain validation") {
  Chain c(2, 1);
  CHECK_THROWS(c.add(Cell{2, [](const Vector& u) { return Point(u); }}));
  CHECK_THROWS(c.add(Cell{1, [](const Vector& u) { return make_point({u[0], 0}); }, 0}));
}
