#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cartan/kernel.hpp"
#include "support.hpp"

using namespace cartan;
using namespace cartan::testing;

namespace {

DifferentialForm coord_wedge(const std::vector<int>& idx, const Domain& dom, bool extended = false) {
  DifferentialForm out = coordinate_differential(idx[0], dom, extended);
  for (std::size_t i = 1; i < idx.size(); ++i) out = wedge(out, coordinate_differential(idx[i], dom, extended));
  return out;
}

// dα = dx1∧dx2∧dx3 on R^5
DifferentialForm r5_form() { return coord_wedge({0, 1, 2}, Domain(5, 50.0)); }

// α = (x3 + x1 x2) dx4 on R^4; D is tangent to the graphs x3 = c - x1 x2 within x4 = const
DifferentialForm curved_dalpha() {
  const Domain dom(4, 50.0);
  return d(one_form(4, false, dom,
                    [](const Point& x) { return make_vec({0, 0, 0, x[2] + x[0] * x[1]}); },
                    "(x3 + x1 x2) dx4"));
}

DifferentialForm oscillator_dsigma() {
  const Domain dom = Domain(2, 10.0).extended(-20, 20);
  const auto sigma = one_form(3, true, dom, [](const Point& x) {
    return make_vec({x[1], 0.0, -0.5 * (x[0] * x[0] + x[1] * x[1])});
  }, "p dq - H dt");
  return d(sigma);
}

double angle_to(const Vector& a, const Vector& b) {
  return std::acos(std::min(1.0, std::abs(a.normalized().dot(b.normalized()))));
}

}  // namespace

TEST_CASE("kernel_at examples") {
  SUBCASE("dx^dy on R3") {
    const KernelFrame f = kernel_at(coord_wedge({0, 1}, Domain(3)), make_point({1, 2, 3}));
    CHECK(f.rank_form == 2);
    REQUIRE(f.dim() == 1);
    CHECK(angle_to(f.basis.col(0), make_vec({0, 0, 1})) < 1e-12);
  }
  SUBCASE("oscillator Poincare-Cartan form") {
    const KernelFrame f = kernel_at(oscillator_dsigma(), make_point({1, 0, 0}));
    CHECK(f.rank_form == 2);
    REQUIRE(f.dim() == 1);
    CHECK(angle_to(f.basis.col(0), make_vec({0, -1, 1})) < 1e-8);
  }
  SUBCASE("ABC vorticity kernel is parallel to v") {
    const auto v = abc_field();
    const auto w = d(flat(v));
    std::mt19937_64 rng(2);
    for (int i = 0; i < 5; ++i) {
      const Point x = random_point(3, rng, 3.0);
      const KernelFrame f = kernel_at(w, x);
      REQUIRE(f.dim() == 1);
      CHECK(angle_to(f.basis.col(0), v(x)) < 1e-8);
    }
  }
  SUBCASE("zero form is flagged and returns the whole space") {
    const KernelFrame f = kernel_at(zero_form(3, 2, Domain(3)), make_point({0, 0, 0}));
    CHECK(f.degenerate);
    CHECK(f.dim() == 3);
    CHECK(f.rank_form == 0);
  }
  SUBCASE("constraint rows") {
    const Domain dom = Domain(2, 10.0).extended(-20, 20);
    const KernelFrame f = kernel_at(oscillator_dsigma(), make_point({1, 0, 0}), {time_differential(dom)});
    CHECK(f.dim() == 0);
    CHECK(f.rank_form + f.constraint_rank + f.dim() == 3);
  }
  SUBCASE("degree 0 input is rejected") {
    CHECK_THROWS_AS(kernel_at(zero_form(3, 0, Domain(3)), make_point({0, 0, 0})), KernelError);
  }
}

TEST_CASE("rank-nullity and kernel quality on random forms") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 + trial % 4;
    const int k = 1 + trial % 3;
    if (k >= n) continue;
    const auto a = random_form(n, k, rng);
    const Point x = random_point(n, rng);
    const KernelFrame f = kernel_at(a, x);
    CHECK(f.dim() + f.rank_form == n);
    const AltTensord val = a(x);
    for (int j = 0; j < f.dim(); ++j) CHECK(interior(Vector(f.basis.col(j)), val).norm() <= 1e-6 * val.norm());
  }
}

TEST_CASE("dimension reports") {
  SUBCASE("decomposable 3-form on R5") {
    std::mt19937_64 rng(1);
    std::vector<Point> pts;
    for (int i = 0; i < 5; ++i) pts.push_back(random_point(5, rng));
    const DimensionReport r = dimension_report(r5_form(), pts);
    CHECK(r.rank == 3);
    CHECK(r.dim_d == 2);
    CHECK(r.constant_rank);
    CHECK(r.bound == 2);
    CHECK(r.bound_equality);
  }
  SUBCASE("oscillator extended space") {
    const DimensionReport r =
        dimension_report(oscillator_dsigma(), {make_point({1, 0, 0}), make_point({0.3, -0.5, 2})});
    CHECK(r.rank == 2);
    CHECK(r.dim_d == 1);
    CHECK(r.constant_rank);
  }
  SUBCASE("rank jump on a hyperplane is flagged") {
    const Domain dom(5, 10.0);
    const auto alpha = wedge(scalar_field(5, false, dom, [](const Point& x) { return 0.5 * x[0] * x[0]; }, "x1^2/2"),
                             coord_wedge({1, 2}, dom));
    const DimensionReport r =
        dimension_report(d(alpha), {make_point({1, 0, 0, 0, 0}), make_point({0, 1, 1, 0, 0})});
    CHECK_FALSE(r.constant_rank);
    CHECK(r.ranks[0] == 3);
    CHECK(r.ranks[1] == 0);
  }
}

TEST_CASE("Frobenius residual") {
  CHECK(frobenius_residual(r5_form(), make_point({0.1, 0.2, 0.3, 0.4, 0.5})) < 1e-8);
  CHECK(frobenius_residual(d(flat(abc_field())), make_point({0.1, 0.2, 0.3})) == 0.0);
  CHECK(frobenius_residual(curved_dalpha(), make_point({0.3, -0.2, 0.1, 0.0})) < 1e-6);
  SUBCASE("non-integrable plane field") {
    // D = ker of contact form dz - y dx via a 2-form with that kernel: (dz - y dx)∧dw on R4
    const Domain dom(4, 10.0);
    const auto theta = one_form(4, false, dom, [](const Point& x) { return make_vec({-x[1], 0, 1, 0}); }, "contact");
    const auto form = wedge(theta, coordinate_differential(3, dom));
    CHECK(frobenius_residual(form, make_point({0.2, 0.3, 0.1, 0.0})) > 0.1);
  }
}

TEST_CASE("vortex line tracing") {
  SUBCASE("rigid rotation lines are vertical") {
    const VortexLine line = trace_vortex_line(d(flat(rotation_field())), make_point({1, 0, 0}), 1.0);
    CHECK(line.complete);
    for (const Point& p : line.nodes) {
      CHECK(std::abs(p[0] - 1.0) < 1e-12);
      CHECK(std::abs(p[1]) < 1e-12);
    }
    CHECK(line.nodes.back()[2] == doctest::Approx(1.0));
  }
  SUBCASE("ABC vortex lines are streamlines") {
    const auto v = abc_field();
    const Point seed = make_point({0.4, -0.3, 1.1});
    const VortexLine line = trace_vortex_line(d(flat(v)), seed, 2.0);
    REQUIRE(line.complete);
    // streamline through the seed, reparametrized by time; oriented like the vortex line
    const double sign = line.tangents[0].dot(v(seed)) > 0 ? 1.0 : -1.0;
    const Trajectory tr = trajectory(v, seed, sign * 2.0, 400);
    std::vector<Vector> tangents;
    for (const Point& p : tr.points) tangents.push_back(sign * v(p).normalized());
    double worst = 0.0;
    for (const Point& p : line.nodes) worst = std::max(worst, distance_to_curve(p, tr.points, tangents));
    MESSAGE("vortex line vs streamline distance = " << worst);
    CHECK(worst < 1e-5);
    CHECK(line.residual < 1e-8);
  }
  SUBCASE("zero vorticity seed is reported") {
    const auto v = VectorField(3, false, Domain(3, 10.0), [](const Point& x) {
      const double r2 = x[0] * x[0] + x[1] * x[1];
      return make_vec({-x[1] * r2, x[0] * r2, 0.0});
    }, "r^2 rotation");
    CHECK_THROWS_AS(trace_vortex_line(d(flat(v)), make_point({0, 0, 0}), 1.0), KernelError);
  }
  SUBCASE("higher-dimensional kernel at the seed is rejected") {
    CHECK_THROWS_AS(trace_vortex_line(r5_form(), make_point({0, 0, 0, 0, 0}), 1.0), KernelError);
  }
}

TEST_CASE("lines move with the fluid") {
  const auto v = abc_field();
  const auto w = d(flat(v));
  const Point seed = make_point({0.4, -0.3, 1.1});
  SUBCASE("ABC at t = 0.5") {
    const LineMotionReport r = check_lines_move_with_fluid(v, w, seed, 0.5);
    MESSAGE("hausdorff = " << r.hausdorff << ", residual = " << r.residual);
    CHECK(r.hausdorff < 1e-4);
    CHECK(r.residual < 1e-4);
  }
  SUBCASE("t = 0 gives zero distance") {
    const LineMotionReport r = check_lines_move_with_fluid(v, w, seed, 0.0);
    CHECK(r.hausdorff == 0.0);
  }
  SUBCASE("non-invariant vorticity is rejected") {
    const auto sheared = VectorField(3, false, Domain(3, 10.0), [](const Point& x) {
      return make_vec({-x[1] * (1 + x[2]), x[0] * (1 + x[2]), 0.0});
    }, "sheared rotation");
    try {
      check_lines_move_with_fluid(sheared, d(flat(sheared)), make_point({0.5, 0.2, 0.1}), 0.5);
      FAIL("expected rejection");
    } catch (const KernelError& e) {
      CHECK(std::string(e.what()).find("not Lie-invariant") != std::string::npos);
    }
  }
}

TEST_CASE("tube strength") {
  SUBCASE("rigid rotation cylinder") {
    const auto w = d(flat(rotation_field()));
    const Vector e1 = make_vec({1, 0, 0}), e2 = make_vec({0, 1, 0});
    const double r = 0.5;
    TubeSpec tube{circle(make_point({0, 0, 0}), r, e1, e2), disc(make_point({0, 0, 0}), r, e1, e2),
                  constant_field(make_vec({0, 0, 1}), Domain(3, 100.0))};
    const TubeReport rep = check_tube_strength(w, tube, 1.0);
    CHECK(rep.difference < 1e-7);
    CHECK(std::abs(rep.flux_start - 2 * std::numbers::pi * r * r) < 1e-6);
    CHECK(rep.passed);
    const TubeReport zero = check_tube_strength(w, tube, 0.0);
    CHECK(zero.difference == 0.0);
  }
  SUBCASE("generalized tube on R5") {
    const Domain dom(5, 50.0);
    const Chain s1 =
        parallelotope(make_point({0, 0, 0, 0, 0}), Matrix::Identity(5, 5).leftCols(3)).with_quad_order(3);
    TubeSpec tube{boundary(s1), s1, constant_field(Vector::Unit(5, 3), dom)};
    const TubeReport rep = check_tube_strength(r5_form(), tube, 2.0);
    CHECK(std::abs(rep.flux_start - 1.0) < 1e-12);
    CHECK(rep.difference < 1e-6);
  }
  SUBCASE("W must annihilate the form") {
    const auto w = d(flat(rotation_field()));
    const Vector e1 = make_vec({1, 0, 0}), e2 = make_vec({0, 1, 0});
    TubeSpec tube{circle(make_point({0, 0, 0}), 0.5, e1, e2), disc(make_point({0, 0, 0}), 0.5, e1, e2),
                  constant_field(make_vec({1, 0, 0}), Domain(3, 100.0))};
    CHECK_THROWS_AS(check_tube_strength(w, tube, 1.0), KernelError);
  }
}

TEST_CASE("integral surfaces") {
  SUBCASE("flat plane in R5") {
    const SurfaceMesh mesh = trace_integral_surface(r5_form(), Point::Zero(5), 1.0, {5});
    CHECK(mesh.complete);
    CHECK(mesh.dim == 2);
    CHECK(mesh.points.size() == 25);
    for (const Point& p : mesh.points) CHECK(p.head(3).norm() < 1e-6);
    CHECK(mesh.max_residual < 1e-6);
  }
  SUBCASE("one-dimensional kernels reduce to line tracing") {
    const auto w = d(flat(abc_field()));
    const Point seed = make_point({0.1, 0.2, 0.3});
    const SurfaceMesh mesh = trace_integral_surface(w, seed, 0.5);
    const VortexLine line = trace_vortex_line(w, seed, 0.5);
    REQUIRE(mesh.points.size() == line.nodes.size());
    for (std::size_t i = 0; i < line.nodes.size(); ++i) CHECK((mesh.points[i] - line.nodes[i]).norm() < 1e-8);
  }
  SUBCASE("curved graph") {
    const SurfaceMesh mesh = trace_integral_surface(curved_dalpha(), Point::Zero(4), 0.6, {7});
    CHECK(mesh.complete);
    double worst = 0.0;
    for (const Point& p : mesh.points)
      worst = std::max({worst, std::abs(p[2] + p[0] * p[1]), std::abs(p[3])});
    MESSAGE("graph defect = " << worst << ", tangent residual = " << mesh.max_residual);
    CHECK(worst < 1e-5);
    CHECK(mesh.max_residual < 1e-5);
  }
  SUBCASE("advected surface keeps annihilating") {
    const Domain dom(5, 50.0);
    const SurfaceMesh mesh = trace_integral_surface(r5_form(), Point::Zero(5), 1.0, {4});
    const auto v = constant_field(Vector::Unit(5, 3), dom);
    const SurfaceMesh moved = advect_surface(mesh, v, 0.7, r5_form());
    CHECK(moved.max_residual < 1e-5);
  }
}

TEST_CASE("pushed-forward kernels match kernels at the image") {
  const auto v = abc_field();
  const auto w = d(flat(v));
  std::mt19937_64 rng(8);
  for (int i = 0; i < 5; ++i) {
    const Point x = random_point(3, rng, 2.0);
    const KernelFrame f = kernel_at(w, x);
    const Matrix pushed = flow_map_jacobian(v, x, 0.4) * f.basis;
    const Matrix q = pushed.householderQr().householderQ() * Matrix::Identity(3, pushed.cols());
    const KernelFrame g = kernel_at(w, advect_point(v, x, 0.4));
    CHECK(max_principal_angle(q, g.basis) < 1e-4);
  }
}

TEST_CASE("principal angles") {
  const Matrix a = Matrix::Identity(3, 3).leftCols(1);
  Matrix b(3, 1);
  b << std::cos(0.3), std::sin(0.3), 0;
  CHECK(max_principal_angle(a, b) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(max_principal_angle(a, Matrix::Identity(3, 3).leftCols(2)) == doctest::Approx(std::numbers::pi / 2));
}
