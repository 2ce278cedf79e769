// Run configuration: a flat `key = value` text with a [scenario] section and
// one [check NAME] section per check, plus the registry of known checks.
//
//   scenario = abc
//   checks   = kelvin, helmholtz_lines
//   seed     = 42
//
//   [check kelvin]
//   t_end = 1.0
#ifndef CARTAN_CONFIG_HPP_
#define CARTAN_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cartan/domain.hpp"

namespace cartan {

inline constexpr const char* kEngineName = "cartan-engine";
inline constexpr const char* kEngineVersion = "1.0.0";
inline constexpr int kCsvSchemaVersion = 1;

/// Parse or validation failure; line and column are 1-based (0 when the
/// problem is not tied to a position, e.g. a command-line override).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  std::string message_;
  int line_;
  int column_;
};

enum class ValueKind { Number, Positive, Count, Vector, Expression, Flag, Text };

struct KeySpec {
  std::string name;
  ValueKind kind = ValueKind::Number;
  std::string fallback;  // empty: derived from the scenario
  std::string help;
};

struct CheckInfo {
  std::string name;
  std::string title;
  std::string description;  // multi-line, shown by `describe`
  bool needs_steady = false;
  bool needs_fluid = false;
  std::vector<KeySpec> keys;
};

const std::vector<CheckInfo>& check_catalog();
const CheckInfo* find_check(std::string_view name);

/// Up to `count` catalog names closest to `name` by edit distance.
std::vector<std::string> suggest_checks(std::string_view name, std::size_t count = 3);

struct ConfigValue {
  std::string text;
  int line = 0;
  int column = 0;
};

struct RunConfig {
  std::string origin = "<config>";
  std::string scenario;
  ConfigValue scenario_at;
  std::vector<std::string> checks;
  std::map<std::string, ConfigValue> check_at;  // where each check was listed
  std::uint64_t seed = 42;
  std::optional<double> tol;  // overrides every check tolerance
  int quad_order = 12;
  std::string out;
  bool parallel = true;
  std::map<std::string, ConfigValue> scenario_params;
  std::map<std::string, std::map<std::string, ConfigValue>> check_options;
};

RunConfig parse_config(std::string_view text, std::string origin = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Typed lookups that fall back to the registry default. Values were
/// validated by the parser, so these only throw for unknown keys.
double option_number(const RunConfig& cfg, const std::string& check, const std::string& key);
int option_count(const RunConfig& cfg, const std::string& check, const std::string& key);
std::optional<Vector> option_vector(const RunConfig& cfg, const std::string& check, const std::string& key);
std::string option_text(const RunConfig& cfg, const std::string& check, const std::string& key);
/// Position of an option in the file, or {} when it was defaulted.
ConfigValue option_source(const RunConfig& cfg, const std::string& check, const std::string& key);

/// The check's `tol` after the global override.
double check_tolerance(const RunConfig& cfg, const std::string& check);

/// Parsing helpers shared with the command line.
double parse_number(const std::string& text, int line, int column);
Vector parse_vector(const std::string& text, int line, int column);

}  // namespace cartan

#endif  // CARTAN_CONFIG_HPP_
