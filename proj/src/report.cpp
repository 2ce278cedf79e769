#include "cartan/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <system_error>

#include "cartan/config.hpp"

namespace cartan {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // folds -0 into +0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size())
    throw std::logic_error("table " + name + ": row has " + std::to_string(row.size()) + " cells, expected " +
                           std::to_string(columns.size()));
  rows.push_back(std::move(row));
}

namespace {

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void append_row(std::string& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += csv_cell(cells[i]);
  }
  out += '\n';
}

}  // namespace

std::string render_csv(const Table& t, const std::vector<std::pair<std::string, std::string>>& meta) {
  std::string out = std::string("# ") + kEngineName + " " + kEngineVersion + " schema=" +
                    std::to_string(kCsvSchemaVersion) + " table=" + t.name;
  for (const auto& [k, v] : meta) out += " " + k + "=" + v;
  out += '\n';
  append_row(out, t.columns);
  for (const auto& row : t.rows) append_row(out, row);
  return out;
}

void write_atomic(const std::filesystem::path& path, std::string_view contents) {
  namespace fs = std::filesystem;
  const fs::path tmp = path.parent_path() / ("." + path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

bool RunReport::passed() const {
  if (checks.empty()) return false;
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

std::string render_report(const RunReport& r, bool with_timings) {
  std::string out;
  auto kv = [&out](const std::string& k, const std::string& v) { out += k + ": " + v + "\n"; };
  kv("engine", std::string(kEngineName) + " " + kEngineVersion);
  kv("config", r.config_origin);
  kv("scenario", r.scenario);
  kv("scenario_summary", r.scenario_summary);
  if (r.constructed) kv("scenario_note", "constructed example for testing, not a physical system");
  for (const auto& [k, v] : r.config_echo) kv("config." + k, v);
  int passed = 0;
  for (const auto& c : r.checks) passed += c.passed ? 1 : 0;
  kv("verdict", std::string(r.passed() ? "PASS" : "FAIL") + " (" + std::to_string(passed) + "/" +
                    std::to_string(r.checks.size()) + " checks)");
  for (const auto& c : r.checks) {
    out += "\n[check " + c.check + "]\n";
    kv("verdict", c.passed ? "PASS" : "FAIL");
    if (with_timings) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3f", c.seconds);
      kv("seconds", buf);
    }
    if (!c.error.empty()) kv("error", c.error);
    for (const auto& [k, v] : c.metrics) kv(k, v);
    for (const auto& n : c.notes) kv("note", n);
    for (const auto& t : c.tables) kv("artifact", t.name + ".csv");
  }
  return out;
}

Table summary_table(const RunReport& r) {
  Table t{"summary", {"check", "passed", "metric", "value"}, {}};
  for (const auto& c : r.checks) {
    const std::string p = c.passed ? "1" : "0";
    t.add_row({c.check, p, "verdict", c.passed ? "PASS" : "FAIL"});
    for (const auto& [k, v] : c.metrics) t.add_row({c.check, p, k, v});
  }
  return t;
}

}  // namespace cartan
