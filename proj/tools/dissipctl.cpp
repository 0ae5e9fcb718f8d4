#include <CLI11.hpp>

#include <iostream>

#include "dissip/config.hpp"
#include "dissip/error.hpp"
#include "dissip/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Dissipativity criteria, form verification and Lame regularity runs"};
  std::string config_path;
  std::string report;
  std::string plot_dir;
  std::string command;
  app.add_option("config", config_path, "YAML run description")->required()->check(CLI::ExistingFile);
  app.add_option("-o,--report", report, "Report path (overrides output.report)");
  app.add_option("-p,--plot-dir", plot_dir, "Directory for CSV plot data (overrides output.plot_dir)");
  app.add_option("-c,--command", command, "Command (overrides the config)")
      ->check(CLI::IsMember({"check", "verify-forms", "solve", "regularity", "report"}));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dissip::kExitInternal;
  }

  try {
    dissip::RunConfig config = dissip::load_config(config_path);
    if (!report.empty()) config.output.report = report;
    if (!plot_dir.empty()) config.output.plot_dir = plot_dir;
    if (!command.empty()) config.command = command;
    return dissip::run_and_write(config, std::cout, std::cerr);
  } catch (const dissip::Error& e) {
    std::cerr << e.what() << '\n';
    return dissip::kExitInternal;
  }
}
