#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dkr/error.hpp"
#include "dkr/experiment.hpp"

namespace {

using json = nlohmann::json;

int report_error(const std::string& kind, const std::string& field, const std::string& message) {
  json err = {{"status", "error"}, {"kind", kind}, {"message", message}};
  if (!field.empty()) err["field"] = field;
  std::cerr << err.dump() << "\n";
  return kind == "validation" ? 2 : 1;
}

std::filesystem::path output_dir(const std::string& flag, const std::string& from_file, const char* fallback) {
  if (!flag.empty()) return flag;
  if (!from_file.empty()) return from_file;
  return fallback;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Double-pulse kicked rotor experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", DKR_VERSION);

  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int workers = 1;

  auto* run_cmd = app.add_subcommand("run", "Run a single experiment");
  run_cmd->add_option("--config", config, "Experiment file (INI)")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--seed", seed, "Override the seed");
  run_cmd->add_option("--out", out, "Output directory");

  auto* sweep_cmd = app.add_subcommand("sweep", "Run the Cartesian product of list-valued keys");
  sweep_cmd->add_option("--config", config, "Sweep file (INI)")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--seed", seed, "Override the seed of every run");
  sweep_cmd->add_option("--out", out, "Output directory");
  sweep_cmd->add_option("--workers", workers, "Concurrent runs")->check(CLI::PositiveNumber);

  auto* validate_cmd = app.add_subcommand("validate", "Check an experiment or sweep file without running it");
  validate_cmd->add_option("--config", config, "Experiment file (INI)")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    const std::string text = dkr::read_text(config);
    if (*run_cmd) {
      auto spec = dkr::parse_spec(text);
      if (seed) spec.seed = *seed;
      const auto manifest = dkr::run(spec, output_dir(out, spec.output, "out"));
      std::cout << json{{"status", "ok"},
                        {"directory", manifest.directory.string()},
                        {"files", manifest.outputs.size()},
                        {"wall_seconds", manifest.wall_seconds}}
                       .dump()
                << "\n";
      return 0;
    }
    if (*sweep_cmd) {
      auto specs = dkr::parse_sweep(text);
      if (seed) {
        for (auto& s : specs) s.seed = *seed;
      }
      const auto report = dkr::sweep(specs, output_dir(out, specs.front().output, "sweep"), workers);
      std::cout << report.to_json();
      return report.ok() ? 0 : 1;
    }
    const auto specs = dkr::parse_sweep(text);
    std::cout << json{{"status", "ok"}, {"experiments", specs.size()}}.dump() << "\n";
    for (const auto& s : specs) std::cout << dkr::serialize(s) << "\n";
    return 0;
  } catch (const dkr::ValidationError& e) {
    return report_error("validation", e.field(), e.what());
  } catch (const std::exception& e) {
    return report_error("runtime", "", e.what());
  }
}
