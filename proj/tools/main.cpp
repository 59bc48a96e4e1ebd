#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crosskerr/config.hpp"
#include "crosskerr/dynamics.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Driven cross-Kerr gate simulator"};
  app.require_subcommand(1);

  CLI::App* run = app.add_subcommand("run", "Run a configured experiment");
  std::string config_path;
  std::vector<std::string> overrides;
  int workers = 0;
  std::string out_dir;
  run->add_option("config", config_path, "Experiment config file")->required();
  run->add_option("--override", overrides,
                  "key=value or section.key=value overrides");
  run->add_option("--workers", workers,
                  "Sweep worker count (default: CROSSKERR_WORKERS or 1)");
  run->add_option("--out", out_dir, "Output directory (default: from config)");

  CLI11_PARSE(app, argc, argv);

  try {
    crosskerr::ConfigFile config =
        crosskerr::ConfigFile::parse_file(config_path);
    for (const std::string& assignment : overrides) {
      config.apply_override(assignment);
    }
    std::string dir = out_dir;
    if (dir.empty()) {
      dir = config.get_string_or("output", "dir", "run_output");
    }
    const crosskerr::RunResult result = crosskerr::run_experiment(
        config, dir, crosskerr::resolve_workers(workers));
    std::printf("%s\n", result.summary_json.c_str());
    return result.exit_code;
  } catch (const crosskerr::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const crosskerr::FlaggedPointsError& e) {
    std::fprintf(stderr, "flagged points: %s\n", e.what());
    return 3;
  } catch (const crosskerr::StepSizeUnderflow& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  }
}
