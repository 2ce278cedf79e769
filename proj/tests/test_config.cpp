#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cartan/config.hpp"

using namespace cartan;

namespace {

ConfigError parse_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("expected ConfigError for:\n" << text);
  return ConfigError("", 0, 0);
}

}  // namespace

TEST_CASE("a full configuration parses") {
  const RunConfig cfg = parse_config(
      "# comment\n"
      "scenario = abc\n"
      "checks = kelvin, helmholtz_lines tube_strength\n"
      "seed = 7\n"
      "tol = 1e-6\n"
      "quad_order = 8\n"
      "out = results\n"
      "parallel = false\n"
      "\n"
      "[scenario]\n"
      "A = 2   ; trailing comment\n"
      "\n"
      "[check kelvin]\n"
      "t_end = 0.5\n"
      "center = 0.1, 0.2, 0.3\n",
      "inline");
  CHECK(cfg.origin == "inline");
  CHECK(cfg.scenario == "abc");
  CHECK(cfg.checks == std::vector<std::string>{"kelvin", "helmholtz_lines", "tube_strength"});
  CHECK(cfg.seed == 7);
  REQUIRE(cfg.tol);
  CHECK(*cfg.tol == 1e-6);
  CHECK(cfg.quad_order == 8);
  CHECK(cfg.out == "results");
  CHECK_FALSE(cfg.parallel);
  CHECK(cfg.scenario_params.at("A").text == "2");
  CHECK(cfg.scenario_params.at("A").line == 11);
  CHECK(option_number(cfg, "kelvin", "t_end") == 0.5);
  CHECK(option_count(cfg, "kelvin", "samples") == 11);
  const auto c = option_vector(cfg, "kelvin", "center");
  REQUIRE(c);
  CHECK((*c - make_vec({0.1, 0.2, 0.3})).norm() == 0.0);
  CHECK_FALSE(option_vector(cfg, "kelvin", "radius"));
  CHECK(check_tolerance(cfg, "kelvin") == 1e-6);
  CHECK(cfg.check_at.at("tube_strength").column == 34);
}

TEST_CASE("defaults come from the check registry") {
  const RunConfig cfg = parse_config("scenario = abc\nchecks = tube_strength\n");
  CHECK(cfg.seed == 42);
  CHECK(cfg.quad_order == 12);
  CHECK(check_tolerance(cfg, "tube_strength") == 1e-7);
  CHECK(option_source(cfg, "tube_strength", "tol").line == 0);
  CHECK_THROWS_AS(option_number(cfg, "tube_strength", "nonexistent"), ConfigError);
}

TEST_CASE("errors carry line and column") {
  SUBCASE("unknown check with a suggestion") {
    const ConfigError e = parse_error("scenario = abc\nchecks = kelvin, frobenus\n");
    CHECK(e.line() == 2);
    CHECK(e.column() == 18);
    CHECK(e.message().find("did you mean frobenius") != std::string::npos);
  }
  SUBCASE("unknown top-level key") {
    const ConfigError e = parse_error("scenario = abc\n  colour = red\nchecks = kelvin\n");
    CHECK(e.line() == 2);
    CHECK(e.column() == 3);
  }
  SUBCASE("unknown check option") {
    const ConfigError e = parse_error("scenario = abc\nchecks = kelvin\n[check kelvin]\nradios = 1\n");
    CHECK(e.line() == 4);
    CHECK(e.message().find("known:") != std::string::npos);
  }
  SUBCASE("non-positive tolerance") {
    const ConfigError e = parse_error("scenario = abc\nchecks = kelvin\ntol = 0\n");
    CHECK(e.line() == 3);
    CHECK(e.column() == 7);
  }
  SUBCASE("bad number in a check section") {
    const ConfigError e = parse_error("scenario = abc\nchecks = kelvin\n[check kelvin]\nt_end = soon\n");
    CHECK(e.line() == 4);
    CHECK(e.column() == 9);
  }
  SUBCASE("bad vector component") {
    const ConfigError e = parse_error("scenario = abc\nchecks = kelvin\n[check kelvin]\ncenter = 1, x, 3\n");
    CHECK(e.line() == 4);
    CHECK(e.column() == 13);
  }
  SUBCASE("section for an unlisted check") {
    const ConfigError e = parse_error("scenario = abc\nchecks = kelvin\n[check frobenius]\n");
    CHECK(e.line() == 3);
  }
  SUBCASE("unknown section") {
    CHECK(parse_error("scenario = abc\nchecks = kelvin\n[output]\n").line() == 3);
  }
  SUBCASE("missing pieces") {
    CHECK(parse_error("checks = kelvin\n").message().find("scenario") != std::string::npos);
    CHECK(parse_error("scenario = abc\n").message().find("no checks") != std::string::npos);
    CHECK(parse_error("scenario = abc\nchecks = kelvin\nkelvin\n").line() == 3);
  }
  SUBCASE("duplicates") {
    CHECK(parse_error("scenario = abc\nscenario = abc\nchecks = kelvin\n").line() == 2);
    CHECK(parse_error("scenario = abc\nchecks = kelvin, kelvin\n").column() == 18);
  }
  SUBCASE("message prefix") {
    const ConfigError e = parse_error("scenario = abc\nchecks = nope\n");
    CHECK(std::string(e.what()).rfind("line 2, column 10: ", 0) == 0);
  }
}

TEST_CASE("quoted values and CRLF input") {
  const RunConfig cfg = parse_config("scenario = \"abc\"\r\nchecks = kelvin\r\n");
  CHECK(cfg.scenario == "abc");
  CHECK(cfg.checks.size() == 1);
}

TEST_CASE("check suggestions") {
  CHECK(suggest_checks("kelvn").front() == "kelvin");
  CHECK(suggest_checks("tube").size() >= 2);
  CHECK(suggest_checks("zzzzzzzzzzzzzzzzzzzz").empty());
  CHECK(check_catalog().size() == 9);
  CHECK(find_check("surface_advect") != nullptr);
}
