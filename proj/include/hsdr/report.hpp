#pragma once

#include "hsdr/core.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace hsdr {

/// One measurement in long format: a method tag, numeric parameters
/// (r, n, component index, ...) and a single named metric value.
struct ReportRow {
  std::string method;
  std::map<std::string, double> params;
  std::string metric;
  double value = 0.0;

  bool operator==(const ReportRow& other) const = default;
};

struct EvalReport {
  int schema_version = 1;
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;  // echoed key=value
  std::string created_at;      // wall-clock stamp, UTC
  double elapsed_seconds = 0;
  std::vector<ReportRow> rows;

  void add(const std::string& method,
           std::initializer_list<std::pair<const std::string, double>> params,
           const std::string& metric, double value) {
    rows.push_back(ReportRow{method, std::map<std::string, double>(params), metric, value});
  }
};

enum class ReportFormat { json, csv };

ReportFormat report_format_from_name(const std::string& name);

/// JSON keeps the full report (versioned schema); CSV holds the rows in a
/// plot-ready long format with one metric per line.
void emit_report(const EvalReport& report, ReportFormat format,
                 const std::string& path);

EvalReport parse_report_json(const std::string& path);
std::vector<ReportRow> parse_report_csv(const std::string& path);

}  // namespace hsdr
