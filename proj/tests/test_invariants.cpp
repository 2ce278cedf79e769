#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cartan/invariants.hpp"
#include "support.hpp"

using namespace cartan;
using namespace cartan::testing;

namespace {

const Domain kOscDomain = Domain(2, 10.0).extended(-20, 20);

VectorField oscillator_xi() {
  return VectorField(3, true, kOscDomain, [](const Point& x) { return make_vec({x[1], -x[0], 1.0}); }, "xi");
}

DifferentialForm oscillator_sigma() {
  return one_form(3, true, kOscDomain,
                  [](const Point& x) { return make_vec({x[1], 0.0, -0.5 * (x[0] * x[0] + x[1] * x[1])}); },
                  "p dq - H dt");
}

Chain phase_circle(double t0) {
  return circle(make_point({0.5, 0.2, t0}), 0.4, make_vec({1, 0, 0}), make_vec({0, 1, 0}), 8, true);
}

}  // namespace

TEST_CASE("absolute invariants") {
  const std::vector<double> ts = {0.0, 0.25, 0.5, 0.75, 1.0};
  SUBCASE("area under rotation") {
    const Domain dom(2, 100.0);
    const auto area = wedge(coordinate_differential(0, dom), coordinate_differential(1, dom));
    const Chain sq = parallelotope(make_point({0.2, 0.1}), Matrix::Identity(2, 2));
    const InvariantReport r = check_absolute_invariant(rotation_field(2), area, sq, ts);
    CHECK(r.passed);
    CHECK(r.max_drift < 1e-7);
    CHECK(r.samples.size() == ts.size());
    CHECK(r.differential_residual < 1e-8);
  }
  SUBCASE("ABC vorticity flux through a disc") {
    const auto v = abc_field();
    const Chain dsc = disc(make_point({0.2, 0.3, 0.1}), 0.5, make_vec({1, 0, 0}), make_vec({0, 1, 0}));
    const InvariantReport r = check_absolute_invariant(v, d(flat(v)), dsc, {0.0, 0.5});
    MESSAGE("ABC flux drift = " << r.max_drift);
    CHECK(r.max_drift < 1e-5);
  }
  SUBCASE("one-dimensional expansion is not length-preserving") {
    const Domain dom(1, 100.0);
    const auto v = VectorField(1, false, dom, [](const Point& x) { return x; }, "x");
    const InvariantReport r = check_absolute_invariant(v, coordinate_differential(0, dom),
                                                       segment(make_point({0}), make_point({1})), {0.0, 0.5, 1.0});
    CHECK_FALSE(r.passed);
    CHECK(r.max_drift == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-9));
    CHECK(r.samples[1].second == doctest::Approx(std::exp(0.5)).epsilon(1e-9));
  }
}

TEST_CASE("relative invariants") {
  SUBCASE("Kelvin circulation for ABC") {
    const auto v = abc_field();
    const Chain c = circle(make_point({0.3, -0.2, 0.5}), 1.0, make_vec({1, 0, 0}), make_vec({0, 0.6, 0.8}));
    const InvariantReport r = check_relative_invariant(v, flat(v), c, {0.0, 0.5, 1.0}, {1e-6});
    CHECK(r.passed);
    CHECK(r.differential_residual < 1e-6);
  }
  SUBCASE("p dq under the oscillator") {
    const Domain dom(2, 10.0);
    const auto v = VectorField(2, false, dom, [](const Point& x) { return make_vec({x[1], -x[0]}); }, "osc");
    const auto pdq = one_form(2, false, dom, [](const Point& x) { return make_vec({x[1], 0.0}); }, "p dq");
    const Chain c = circle(make_point({0.5, 0.2}), 0.4, make_vec({1, 0}), make_vec({0, 1}));
    const InvariantReport r = check_relative_invariant(v, pdq, c, {0.0, 1.0, 2.0}, {1e-6});
    CHECK(r.passed);
    CHECK(std::abs(r.samples[0].second + std::numbers::pi * 0.16) < 1e-9);
  }
  SUBCASE("exact forms integrate to zero") {
    const auto v = abc_field();
    const auto f = scalar_field(3, false, Domain(3, 20.0), [](const Point& x) { return x[0] * x[1] + std::sin(x[2]); }, "f");
    const Chain c = circle(make_point({0, 0, 0}), 1.0, make_vec({1, 0, 0}), make_vec({0, 1, 0}));
    const InvariantReport r = check_relative_invariant(v, d(f), c, {0.0, 0.5});
    for (const auto& s : r.samples) CHECK(std::abs(s.second) < 1e-8);
  }
  SUBCASE("non-cycles are rejected with the failing probe") {
    const auto v = abc_field();
    try {
      check_relative_invariant(v, flat(v), segment(make_point({0, 0, 0}), make_point({1, 0, 0})), {0.0});
      FAIL("expected InvariantError");
    } catch (const InvariantError& e) {
      CHECK(std::string(e.what()).find("probe 0") != std::string::npos);
    }
  }
}

TEST_CASE("tube of solutions") {
  const auto xi = oscillator_xi();
  const auto sigma = oscillator_sigma();
  SUBCASE("node-dependent durations") {
    const Chain c1 = phase_circle(0.0);
    const InvariantReport r = check_tube_of_solutions(
        xi, sigma, c1, [](const Point& x) { return 0.7 + 0.5 * x[0] - 0.3 * x[1] * x[1]; });
    MESSAGE("tube drift = " << r.max_drift << ", swept flux = " << *r.swept_flux);
    CHECK(r.max_drift < 1e-6);
    REQUIRE(r.swept_flux);
    CHECK(std::abs(*r.swept_flux) < 1e-6);
    CHECK(r.passed);
  }
  SUBCASE("identical cycles") {
    const Chain c1 = phase_circle(0.0);
    const InvariantReport r = check_tube_of_solutions(xi, sigma, c1, c1);
    CHECK(r.max_drift == 0.0);
  }
  SUBCASE("non-solution forms are rejected") {
    const auto wrong = one_form(3, true, kOscDomain, [](const Point& x) { return make_vec({x[1], 0.0, 0.0}); }, "p dq");
    try {
      check_tube_of_solutions(xi, wrong, phase_circle(0.0), [](const Point&) { return 1.0; });
      FAIL("expected rejection");
    } catch (const InvariantError& e) {
      CHECK(std::string(e.what()).find("not a solution form") != std::string::npos);
    }
  }
  SUBCASE("cycles at different time slices of a steady flow") {
    const Domain dom = Domain(3, 20.0).extended(-5, 5);
    const auto v = abc_field();
    const VectorField xi3(4, true, dom, [v](const Point& x) {
      Vector out(4);
      out << v(Point(x.head(3))), 1.0;
      return out;
    }, "xi");
    const auto sigma3 = one_form(4, true, dom, [v](const Point& x) {
      const Vector u = v(Point(x.head(3)));
      Vector out(4);
      out << u, -1.5;
      return out;
    }, "v - E dt");
    const Chain c1 = circle(make_point({0.3, -0.2, 0.5, 0.0}), 1.0, make_vec({1, 0, 0, 0}), make_vec({0, 1, 0, 0}), 8, true);
    const Chain c2 = slide_along(xi3, c1, [](const Point&) { return 1.0; });
    const InvariantReport r = check_tube_of_solutions(xi3, sigma3, c1, c2);
    CHECK(r.max_drift < 1e-6);
  }
}
