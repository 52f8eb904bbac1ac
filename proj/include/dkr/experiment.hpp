#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dkr/decoherence.hpp"
#include "dkr/diffusion.hpp"
#include "dkr/pulse.hpp"

namespace dkr {

enum class Mode { classical, quantum, floquet, wigner, mc_wavefunction, compare };

std::string_view to_string(Mode mode);
std::string_view to_string(DecoherenceKind kind);

/// One experiment. Files use INI syntax with sections [experiment], [config],
/// [classical] and [quantum]; see README for the keys.
struct ExperimentSpec {
  Mode mode = Mode::classical;
  KickConfig config;
  int kicks = 70;
  std::uint64_t seed = 1;
  std::string output;

  std::size_t ensemble = 100000;
  int poincare_orbits = 0;
  int poincare_periods = 0;
  FitWindow fit_window;

  int basis_size = 128;
  DecoherenceKind decoherence = DecoherenceKind::none;
  double eta = 0.0;
  int realizations = 2000;
  int q_grid = 64;

  /// Throws ValidationError naming the offending key.
  void validate() const;
};

/// Parses a single experiment. Keys holding comma-separated lists are rejected.
ExperimentSpec parse_spec(std::string_view text);

/// Parses a sweep: every key may hold a comma-separated list, and the
/// Cartesian product of all lists is returned in file order.
std::vector<ExperimentSpec> parse_sweep(std::string_view text);

std::string serialize(const ExperimentSpec& spec);

std::string read_text(const std::filesystem::path& path);

struct OutputFile {
  std::string name;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::string spec_text;
  std::string mode;
  std::string version;
  double wall_seconds = 0.0;
  std::vector<std::uint64_t> seeds;
  std::vector<OutputFile> outputs;
  std::filesystem::path directory;

  std::string to_json() const;
};

std::string sha256_hex(std::string_view data);

/// Runs the pipeline for `spec`, writing CSV/JSON outputs and manifest.json
/// into `out_dir`. Files written by a failed run are removed.
RunManifest run(const ExperimentSpec& spec, const std::filesystem::path& out_dir);

struct SweepFailure {
  std::size_t index = 0;
  std::string field;
  std::string message;
};

struct SweepReport {
  std::vector<RunManifest> manifests;
  std::vector<SweepFailure> failures;

  bool ok() const { return failures.empty(); }
  std::string to_json() const;
};

/// Runs each spec into out_dir/run_NNN with at most `workers` concurrent runs.
/// Classical runs add flux_vs_K.csv and Wigner runs add strangeness.csv to out_dir.
SweepReport sweep(const std::vector<ExperimentSpec>& specs, const std::filesystem::path& out_dir, int workers = 1);

}  // namespace dkr
