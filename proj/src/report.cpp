#include "hsdr/report.hpp"

#include <json.hpp>

#include <cinttypes>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

namespace hsdr {

using nlohmann::json;

ReportFormat report_format_from_name(const std::string& name) {
  if (name == "json") return ReportFormat::json;
  if (name == "csv") return ReportFormat::csv;
  throw ConfigError("unknown report format '" + name + "'");
}

namespace {

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void emit_json(const EvalReport& report, const std::string& path) {
  json j;
  j["schema_version"] = report.schema_version;
  j["command"] = report.command;
  j["created_at"] = report.created_at;
  j["elapsed_seconds"] = report.elapsed_seconds;
  json cfg = json::object();
  for (const auto& [key, value] : report.config) cfg[key] = value;
  j["config"] = cfg;
  json rows = json::array();
  for (const ReportRow& row : report.rows) {
    json r;
    r["method"] = row.method;
    r["params"] = row.params;
    r["metric"] = row.metric;
    r["value"] = row.value;
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);

  std::ofstream out(path);
  if (!out) throw IoError("emit_report: cannot open " + path);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("emit_report: write failed for " + path);
}

void emit_csv(const EvalReport& report, const std::string& path) {
  std::set<std::string> keys;
  for (const ReportRow& row : report.rows)
    for (const auto& [key, value] : row.params) keys.insert(key);

  std::ofstream out(path);
  if (!out) throw IoError("emit_report: cannot open " + path);
  out << "method";
  for (const std::string& key : keys) out << "," << key;
  out << ",metric,value\n";
  for (const ReportRow& row : report.rows) {
    out << row.method;
    for (const std::string& key : keys) {
      out << ",";
      const auto it = row.params.find(key);
      if (it != row.params.end()) out << format_value(it->second);
    }
    out << "," << row.metric << "," << format_value(row.value) << "\n";
  }
  if (!out) throw IoError("emit_report: write failed for " + path);
}

}  // namespace

void emit_report(const EvalReport& report, ReportFormat format,
                 const std::string& path) {
  if (format == ReportFormat::json)
    emit_json(report, path);
  else
    emit_csv(report, path);
}

EvalReport parse_report_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("parse_report_json: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("parse_report_json: " + std::string(e.what()));
  }
  EvalReport report;
  report.schema_version = j.value("schema_version", 1);
  report.command = j.value("command", "");
  report.created_at = j.value("created_at", "");
  report.elapsed_seconds = j.value("elapsed_seconds", 0.0);
  if (j.contains("config"))
    for (const auto& [key, value] : j["config"].items())
      report.config.emplace_back(key, value.get<std::string>());
  for (const json& r : j.value("rows", json::array())) {
    ReportRow row;
    row.method = r.value("method", "");
    row.metric = r.value("metric", "");
    row.value = r.value("value", 0.0);
    if (r.contains("params"))
      for (const auto& [key, value] : r["params"].items())
        row.params[key] = value.get<double>();
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::vector<ReportRow> parse_report_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("parse_report_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw IoError("parse_report_csv: empty file " + path);

  std::vector<std::string> columns;
  {
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) columns.push_back(cell);
  }
  if (columns.size() < 3 || columns.front() != "method" ||
      columns[columns.size() - 2] != "metric" || columns.back() != "value")
    throw IoError("parse_report_csv: unexpected header in " + path);

  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    while (cells.size() < columns.size()) cells.push_back("");
    if (cells.size() != columns.size())
      throw IoError("parse_report_csv: ragged row in " + path);
    ReportRow row;
    row.method = cells[0];
    for (std::size_t c = 1; c + 2 < columns.size(); ++c)
      if (!cells[c].empty()) row.params[columns[c]] = std::stod(cells[c]);
    row.metric = cells[columns.size() - 2];
    row.value = std::stod(cells[columns.size() - 1]);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace hsdr
