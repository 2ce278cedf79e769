// Command-line entry point: run a configuration, list scenarios and checks,
// or describe one check.
#include <CLI11.hpp>

#include <iostream>

#include "cartan/runner.hpp"

namespace {

enum ExitCode { kOk = 0, kChecksFailed = 1, kConfigError = 2, kScenarioError = 3, kIoError = 4 };

void print_summary(const cartan::RunReport& report, const std::filesystem::path& dir) {
  for (const auto& c : report.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.check;
    for (const auto& [k, v] : c.metrics)
      if (k == "max_drift" || k == "max_residual" || k == "hausdorff" || k == "difference" ||
          k == "max_principal_angle" || k == "streamline_max" || k == "advected_residual")
        std::cout << "  " << k << "=" << v;
    if (!c.error.empty()) std::cout << "  error: " << c.error;
    std::cout << "\n";
  }
  std::cout << (report.passed() ? "all checks passed" : "some checks failed") << "; artifacts in " << dir.string()
            << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification of integral invariants and Helmholtz-type theorems"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_dir;
  std::uint64_t seed = 0;
  double tol = 0.0;
  int quad_order = 0;
  bool quiet = false;
  auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides the config)");
  auto* tol_opt = app.add_option("--tol", tol, "tolerance for every check (overrides the config)")
                      ->check(CLI::PositiveNumber);
  auto* quad_opt = app.add_option("--quad-order", quad_order, "Gauss-Legendre nodes per axis")->check(CLI::Range(1, 64));
  app.add_option("--out", out_dir, std::string("output directory (default: config 'out', then $") +
                                       cartan::kOutDirEnv + ", then " + cartan::kDefaultOutDir + ")");
  app.add_flag("--quiet,-q", quiet, "print nothing on success");

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "run the checks of a configuration file");
  run_cmd->add_option("config", config_path, "configuration file")->required();
  auto* list_cmd = app.add_subcommand("list", "list scenarios and checks");
  std::string check_name;
  auto* describe_cmd = app.add_subcommand("describe", "explain what a check verifies");
  describe_cmd->add_option("check", check_name, "check name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (list_cmd->parsed()) {
    std::cout << cartan::list_text();
    return kOk;
  }
  if (describe_cmd->parsed()) {
    try {
      std::cout << cartan::describe_check(check_name);
      return kOk;
    } catch (const cartan::ConfigError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kConfigError;
    }
  }
  (void)run_cmd;

  cartan::RunConfig cfg;
  try {
    cfg = cartan::load_config(config_path);
  } catch (const cartan::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << "\n";
    return kConfigError;
  }
  if (*seed_opt) cfg.seed = seed;
  if (*tol_opt) cfg.tol = tol;
  if (*quad_opt) cfg.quad_order = quad_order;
  const std::filesystem::path dir = cartan::resolve_out_dir(out_dir, cfg);

  try {
    const cartan::RunReport report = cartan::run(cfg, {dir, true});
    if (!quiet || !report.passed()) print_summary(report, dir);
    return report.passed() ? kOk : kChecksFailed;
  } catch (const cartan::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << "\n";
    return kConfigError;
  } catch (const cartan::ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return kScenarioError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  }
}
