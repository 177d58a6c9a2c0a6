#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "linemap/cli/config.hpp"
#include "linemap/cli/report.hpp"
#include "linemap/cli/scenarios.hpp"
#include "linemap/error.hpp"

namespace {

constexpr int kExitFailedCheck = 1;
constexpr int kExitConfig = 2;

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw linemap::Error(linemap::ErrorKind::kIo, "cannot write '" + path + "'");
  out << text;
  if (!out) throw linemap::Error(linemap::ErrorKind::kIo, "write failed for '" + path + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-space mapping verification scenarios"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> scenario, output, csv;
  std::string format = "json";
  std::optional<std::uint64_t> seed;
  std::optional<int> steps;
  bool timing = false;

  CLI::App* run = app.add_subcommand("run", "Run one verification scenario");
  run->add_option("--config", config_path, "Scenario config (JSON)")->required();
  run->add_option("--scenario", scenario, "Override the scenario name");
  run->add_option("--output", output, "Report path (default: stdout, or $LINEMAP_OUTPUT_DIR/<scenario>.<ext>)");
  run->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "text"}));
  run->add_option("--seed", seed, "Override the random seed");
  run->add_option("--steps", steps, "Override the integration step count")->check(CLI::Range(2, 10'000'000));
  run->add_option("--csv", csv, "Write the scenario trajectory as CSV");
  run->add_flag("--timing", timing, "Include wall time in the JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    linemap::cli::ScenarioConfig cfg = linemap::cli::load_config(config_path);
    if (scenario) {
      const auto& names = linemap::cli::scenario_names();
      if (std::find(names.begin(), names.end(), *scenario) == names.end()) {
        throw linemap::Error(linemap::ErrorKind::kConfig, "--scenario: unknown name '" + *scenario + "'");
      }
      cfg.scenario = *scenario;
    }
    if (seed) cfg.seed = *seed;
    if (steps) cfg.steps = *steps;

    const linemap::cli::RunResult result = linemap::cli::run(cfg);
    const std::string text = format == "json" ? linemap::cli::emit_json(result.report, timing)
                                              : linemap::cli::emit_text(result.report);

    std::optional<std::string> path = output;
    if (!path) {
      if (const char* dir = std::getenv("LINEMAP_OUTPUT_DIR"); dir && *dir) {
        std::filesystem::create_directories(dir);
        path = (std::filesystem::path(dir) / (cfg.scenario + "." + format)).string();
      }
    }
    if (path) {
      write_file(*path, text);
    } else {
      std::cout << text;
    }
    if (csv) {
      if (!result.trajectory) {
        throw linemap::Error(linemap::ErrorKind::kUsage, "scenario " + cfg.scenario + " has no trajectory to export");
      }
      std::ofstream out(*csv, std::ios::binary);
      if (!out) throw linemap::Error(linemap::ErrorKind::kIo, "cannot write '" + *csv + "'");
      linemap::write_trajectory_csv(*result.trajectory, out);
    }
    return result.report.pass() ? 0 : kExitFailedCheck;
  } catch (const linemap::Error& e) {
    std::cerr << "linemap: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "linemap: io error: " << e.what() << "\n";
    return kExitConfig;
  }
}
