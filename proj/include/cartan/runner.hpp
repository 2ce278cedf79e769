// Executes the checks of a run configuration against a scenario and writes
// the report and CSV artifacts.
#ifndef CARTAN_RUNNER_HPP_
#define CARTAN_RUNNER_HPP_

#include <filesystem>
#include <string>

#include "cartan/config.hpp"
#include "cartan/report.hpp"
#include "cartan/scenario.hpp"

namespace cartan {

/// Environment variable consulted for the output directory when neither the
/// command line nor the config names one.
inline constexpr const char* kOutDirEnv = "CARTAN_OUT_DIR";
inline constexpr const char* kDefaultOutDir = "cartan-out";

/// Loads the configured scenario. Bad parameters become ConfigError at their
/// position; failed self-checks propagate as ScenarioError.
Scenario build_scenario(const RunConfig& cfg);

/// Rejects checks that cannot apply to the scenario and options that do not
/// fit it (vector lengths, expressions), with config positions.
void validate_checks(const RunConfig& cfg, const Scenario& s);

/// One check. Numerical failures are recorded in the result, never thrown.
CheckResult run_check(const std::string& check, const Scenario& s, const RunConfig& cfg);

struct RunOptions {
  std::filesystem::path out_dir;  // empty: do not write files
  bool timings = true;            // include wall-clock times in the report
};

RunReport run(const RunConfig& cfg, const RunOptions& opts = {});

/// Writes report.txt, summary.csv and every check table into `dir`
/// (created if needed); returns the file names in write order.
std::vector<std::string> write_artifacts(const RunReport& report, const RunConfig& cfg,
                                         const std::filesystem::path& dir, bool timings = true);

/// Output directory precedence: explicit, then config `out`, then the
/// environment variable, then the built-in default.
std::filesystem::path resolve_out_dir(const std::string& explicit_dir, const RunConfig& cfg);

std::string describe_check(const std::string& name);
std::string list_text();

}  // namespace cartan

#endif  // CARTAN_RUNNER_HPP_
