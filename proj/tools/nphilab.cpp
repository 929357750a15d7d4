#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nphi/lab.hpp"

int main(int argc, char** argv) {
  CLI::App app{"nphilab: numerical laboratory for quotient-module shift pairs on the bidisk"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string format = "json";
  std::vector<std::string> suite_override;

  CLI::App* run_cmd = app.add_subcommand("run", "run verification suites from a config");
  run_cmd->add_option("--config", config_path, "path to the JSON config")->required();
  run_cmd->add_option("--out", out_path, "output path (default: stdout)");
  run_cmd->add_option("--format", format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  run_cmd->add_option("--suite", suite_override, "override the config's suite list");

  CLI11_PARSE(app, argc, argv);

  try {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot open config '" << config_path << "'\n";
      return 2;
    }
    nlohmann::json j = nlohmann::json::parse(in);
    nphi::LabConfig config = nphi::config_from_json(j);
    if (!suite_override.empty()) config.suites = suite_override;

    const nphi::VerificationReport report = nphi::run(config);
    nphi::emit(report, format, out_path);
    return report.ok() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
