// Run results, their structured-text report, versioned CSV tables, and
// atomic file output.
#ifndef CARTAN_REPORT_HPP_
#define CARTAN_REPORT_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cartan {

/// Fixed-format number used in every artifact (%.12e; nan and inf spelled out).
std::string format_number(double v);

struct Table {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
};

/// CSV text: a `# cartan-engine <version> ...` line, the column header, then
/// rows, all LF-terminated. `meta` pairs are appended to the first line.
std::string render_csv(const Table& t, const std::vector<std::pair<std::string, std::string>>& meta);

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view contents);

struct CheckResult {
  std::string check;
  bool passed = false;
  std::vector<std::pair<std::string, std::string>> metrics;
  std::vector<std::string> notes;
  std::vector<Table> tables;
  std::string error;  // set when the check aborted
  double seconds = 0.0;

  void metric(const std::string& key, double value) { metrics.emplace_back(key, format_number(value)); }
  void metric(const std::string& key, const std::string& value) { metrics.emplace_back(key, value); }
  void metric(const std::string& key, const char* value) { metrics.emplace_back(key, value); }
  void metric(const std::string& key, int value) { metrics.emplace_back(key, std::to_string(value)); }
  void metric(const std::string& key, bool value) { metrics.emplace_back(key, value ? "true" : "false"); }
};

struct RunReport {
  std::string config_origin;
  std::string scenario;
  std::string scenario_summary;
  bool constructed = false;
  std::vector<std::pair<std::string, std::string>> config_echo;
  std::vector<CheckResult> checks;
  std::vector<std::string> artifacts;  // file names written next to the report

  bool passed() const;
};

std::string render_report(const RunReport& r, bool with_timings = true);

/// `name,check,passed,metric,value` rows for every metric of every check.
Table summary_table(const RunReport& r);

}  // namespace cartan

#endif  // CARTAN_REPORT_HPP_
