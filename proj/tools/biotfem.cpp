#include "biot/runner.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <iostream>

int main(int argc, char **argv)
{
  CLI::App app{"Frequency-domain Biot poroelasticity solver"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string output_dir;
  std::string log_level = "info";
  bool parallel = false;
  bool timing = false;

  app.add_option("--output-dir", output_dir, "Output directory (overrides config and BIOTFEM_OUTPUT_DIR)");
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error, critical or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}));
  auto *seq = app.add_flag("--sequential", "Run studies sequentially (default)");
  app.add_flag("--parallel", parallel, "Run independent study cases concurrently")->excludes(seq);
  app.add_flag("--timing", timing, "Record wall-clock times in CSV output");

  auto *run = app.add_subcommand("run", "Execute the configured study");
  auto *validate = app.add_subcommand("validate", "Check a configuration without computing");
  auto *spectrum = app.add_subcommand("spectrum", "Elasticity eigenvalues and frequency gap");
  auto *infsup = app.add_subcommand("infsup", "Discrete inf-sup estimates over mesh levels");
  for (auto *sub : {run, validate, spectrum, infsup})
    sub->add_option("config", config_path, "JSON configuration file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : biot::exit_config_error;
  }

  spdlog::set_level(spdlog::level::from_str(log_level));
  spdlog::set_pattern("[%l] %v");

  biot::RunOptions options;
  options.output_dir = output_dir;
  options.parallel = parallel;
  options.timing = timing;

  try {
    const auto config = biot::load_config(config_path);
    if (validate->parsed()) {
      std::cout << config_path << ": valid (" << biot::to_string(config.study) << ")\n";
      return biot::exit_ok;
    }
    biot::RunResult result;
    if (run->parsed())
      result = biot::run_study(config, options);
    else if (spectrum->parsed())
      result = biot::run_spectrum(config, options);
    else
      result = biot::run_infsup(config, options);
    return result.exit_code;
  } catch (const biot::ConfigError &e) {
    for (const auto &issue : e.issues())
      spdlog::error("{}", issue);
    return biot::exit_config_error;
  } catch (const std::exception &e) {
    spdlog::error("{}", e.what());
    return biot::exit_code_for(std::current_exception());
  }
}
