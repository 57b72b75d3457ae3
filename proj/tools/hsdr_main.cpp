#include "hsdr/experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <string>

namespace {

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const hsdr::ConfigError*>(&e) ||
      dynamic_cast<const hsdr::InvalidSpec*>(&e) ||
      dynamic_cast<const hsdr::InvalidInput*>(&e) ||
      dynamic_cast<const hsdr::InvalidTarget*>(&e) ||
      dynamic_cast<const hsdr::MissingClass*>(&e))
    return 2;
  if (dynamic_cast<const hsdr::NumericalFailure*>(&e) ||
      dynamic_cast<const hsdr::DegenerateData*>(&e) ||
      dynamic_cast<const hsdr::DegenerateScores*>(&e))
    return 3;
  if (dynamic_cast<const hsdr::FormatError*>(&e) ||
      dynamic_cast<const hsdr::IoError*>(&e))
    return 4;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hsdr: hyperspectral dimensionality reduction experiments"};
  app.require_subcommand(1);

  const std::vector<std::string> commands = {
      "synth",    "fit",       "transform", "reconstruct", "eval-mi",
      "eval-atpv", "detect",   "classify",  "bench"};

  std::string config_path, out_path, format, seed;
  for (const std::string& name : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--out", out_path, "report output path (default: stdout)");
    sub->add_option("--format", format, "report format: json | csv");
    sub->add_option("--seed", seed, "override the config seed");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    hsdr::ExperimentConfig config = hsdr::load_config(command, config_path);
    if (!seed.empty()) config.set("seed", seed);
    if (!format.empty()) config.set("format", format);

    const hsdr::EvalReport report = hsdr::run(config);

    const hsdr::ReportFormat fmt =
        hsdr::report_format_from_name(config.get_string("format", "json"));
    std::string target = out_path;
    if (target.empty()) target = config.get_string("out", "");
    if (target.empty()) target = "/dev/stdout";
    hsdr::emit_report(report, fmt, target);
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  }
}
