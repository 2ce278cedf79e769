#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cartan/scenario.hpp"
#include "support.hpp"

using namespace cartan;

namespace {

double max_stationary_residual(const Scenario& s, int count) {
  double worst = 0.0;
  for (const Point& x : sample_points(s, count, 7, false))
    worst = std::max(worst, stationary_euler_residual(s, x).max_abs());
  return worst;
}

}  // namespace

TEST_CASE("every catalog entry loads and passes its self-check") {
  for (const auto& name : catalog()) {
    CAPTURE(name);
    CHECK_NOTHROW(load_scenario(name));
  }
}

TEST_CASE("unknown scenarios and parameters are reported") {
  try {
    load_scenario("hurricane");
    FAIL("expected ScenarioError");
  } catch (const ScenarioError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("hurricane") != std::string::npos);
    CHECK(msg.find("taylor_green") != std::string::npos);
  }
  CHECK_THROWS_AS(load_scenario("abc", {{"D", 1.0}}), ScenarioError);
  CHECK_THROWS_AS(load_scenario("strain", {{"omega", 1.0}}), ScenarioError);
}

TEST_CASE("stationary Euler residuals of steady fluids") {
  for (const std::string name : {"rigid_rotation", "rigid_rotation_gravity", "taylor_green", "abc", "uniform"}) {
    CAPTURE(name);
    const Scenario s = load_scenario(name);
    CHECK(max_stationary_residual(s, 30) < 1e-5);
  }
  SUBCASE("Taylor-Green needs p = +(cos 2x + cos 2y)/4") {
    CustomFluidSpec spec;
    spec.velocity = {"sin(x)*cos(y)", "-cos(x)*sin(y)", "0"};
    spec.pressure = "-(cos(2*x) + cos(2*y))/4";
    spec.solution = false;
    const Scenario wrong = custom_fluid(spec);
    CHECK(max_stationary_residual(wrong, 30) > 1e-2);
    spec.pressure = "(cos(2*x) + cos(2*y))/4";
    spec.solution = true;
    CHECK_NOTHROW(custom_fluid(spec));
  }
  SUBCASE("non-solution fixtures have O(1) residuals") {
    CHECK(max_stationary_residual(load_scenario("strain"), 30) > 1e-2);
    CHECK(max_stationary_residual(load_scenario("sheared_rotation"), 30) > 1e-2);
  }
  SUBCASE("a wrong custom fluid fails its self-check") {
    CustomFluidSpec spec;
    spec.velocity = {"x", "-y", "0"};
    CHECK_THROWS_AS(custom_fluid(spec), ScenarioError);
  }
}

TEST_CASE("Hill's vortex solves the unsteady equations away from its shell") {
  const Scenario s = load_scenario("hill_vortex");
  CHECK_FALSE(s.steady);
  double worst = 0.0;
  for (const Point& x : sample_points(s, 40, 3, true))
    worst = std::max(worst, unsteady_euler_residual(s, x).solution.max_abs());
  MESSAGE("Hill residual = " << worst);
  CHECK(worst < 1e-4);
  SUBCASE("the shell is excluded from the extended domain") {
    CHECK_FALSE(s.extended_domain.contains(make_point({1.0, 0.0, -0.25, 0.25})));
    CHECK(s.extended_domain.contains(make_point({0.5, 0.0, -0.25, 0.25})));
  }
}

TEST_CASE("sigma splits back into its pieces") {
  for (const std::string name : {"abc", "oscillator", "r5_decomposable", "drifting_graph"}) {
    CAPTURE(name);
    const Scenario s = load_scenario(name);
    const SpatialSplit sp = split_extended(s.sigma);
    for (const Point& x : sample_points(s, 5, 11, true)) {
      CHECK((sp.r_hat(x) - s.alpha_hat(x)).max_abs() < 1e-14);
      CHECK((sp.s_hat(x) - s.beta_hat(x)).max_abs() < 1e-14);
    }
  }
  CHECK_THROWS_AS(build_sigma(load_scenario("abc").alpha_hat, load_scenario("r5_decomposable").beta_hat),
                  ScenarioError);
}

TEST_CASE("the decomposed residual and i_xi d sigma vanish together") {
  for (const auto& name : catalog()) {
    CAPTURE(name);
    const Scenario s = load_scenario(name);
    for (const Point& x : sample_points(s, 6, 5, true)) {
      const EquivalenceSample e = cartan_residuals(s, x);
      CHECK(vanish_together(e, 1e-4));
      CHECK(e.spatial_mismatch < 1e-5 * std::max(1.0, e.decomposed_norm));
      CHECK(e.time_mismatch < 1e-5 * std::max(1.0, e.decomposed_norm));
    }
  }
  SUBCASE("a non-solution is detected by both sides") {
    const Scenario s = load_scenario("strain");
    const EquivalenceSample e = cartan_residuals(s, make_point({0.5, 0.3, 0.1, 0.0}));
    CHECK(e.decomposed_norm > 0.1);
    CHECK(e.spatial_norm > 0.1);
  }
}

TEST_CASE("Bernoulli function along streamlines and vortex lines") {
  SUBCASE("Taylor-Green") {
    const BernoulliReport r = bernoulli_checks(load_scenario("taylor_green"), 1e-6);
    MESSAGE("TG streamline " << r.streamline_max << ", vortex line " << r.vortex_line_max);
    CHECK(r.streamline_max < 1e-7);
    CHECK(r.passed);
    CHECK_FALSE(r.irrotational);
  }
  SUBCASE("ABC has constant E") {
    const BernoulliReport r = bernoulli_checks(load_scenario("abc"));
    CHECK(r.variation < 1e-6);
    CHECK(r.passed);
    CHECK(r.vortex_lines_traced > 0);
  }
  SUBCASE("uniform stream is irrotational") {
    const BernoulliReport r = bernoulli_checks(load_scenario("uniform"));
    CHECK(r.irrotational);
    CHECK(r.variation < 1e-12);
    CHECK(r.passed);
  }
  SUBCASE("strain fails") {
    const BernoulliReport r = bernoulli_checks(load_scenario("strain"));
    CHECK_FALSE(r.passed);
  }
  CHECK_THROWS_AS(bernoulli_checks(load_scenario("hill_vortex")), ScenarioError);
}

TEST_CASE("vorticity 2-form matches the curl") {
  const Scenario s = load_scenario("rigid_rotation", {{"omega", 2.0}});
  const Vector w = curl(s.v, make_point({0.3, 0.2, 0.1}));
  CHECK(std::abs(w[2] - 4.0) < 1e-8);
  CHECK(vorticity_mismatch(s, make_point({0.3, 0.2, 0.1})) < 1e-8);
}
