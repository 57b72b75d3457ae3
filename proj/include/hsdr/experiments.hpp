#pragma once

#include "hsdr/core.hpp"
#include "hsdr/report.hpp"

#include <string>
#include <utility>
#include <vector>

namespace hsdr {

/// Parsed `key = value` experiment configuration for one CLI command.
/// Accessors throw ConfigError naming the offending key.
class ExperimentConfig {
 public:
  ExperimentConfig(std::string command,
                   std::vector<std::pair<std::string, std::string>> entries);

  const std::string& command() const { return command_; }
  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);

  std::string get_string(const std::string& key) const;  // required
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  long long get_int(const std::string& key) const;  // required
  std::uint64_t get_seed() const;
  std::vector<std::string> get_string_list(const std::string& key) const;
  std::vector<long long> get_int_list(const std::string& key) const;

 private:
  const std::string* find(const std::string& key) const;

  std::string command_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// `key = value` lines, `#` comments, lists comma-separated.
ExperimentConfig parse_config_text(const std::string& command,
                                   const std::string& text);
ExperimentConfig load_config(const std::string& command,
                             const std::string& path);

/// Executes the named experiment end-to-end and returns its report.
EvalReport run(const ExperimentConfig& config);

}  // namespace hsdr
