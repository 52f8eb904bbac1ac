#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dkr/quantum.hpp"

namespace dkr {

enum class RecoilMode { discretized, continuous };

/// Spontaneous emission with probability eta per kicking cycle.
struct EmissionModel {
  double eta = 0.0;
  RecoilMode recoil_mode = RecoilMode::discretized;

  void validate() const;
};

enum class DecoherenceKind { none, spontaneous_emission, anti_zeno };

struct DecoherenceModel {
  DecoherenceKind kind = DecoherenceKind::none;
  double eta = 0.0;
};

/// <m|rho|n> <- eta/2 (<m+1|rho|n+1> + <m-1|rho|n-1>) + (1 - eta) <m|rho|n>,
/// indices periodic in N.
DensityMatrix spontaneous_emission_map(const DensityMatrix& rho, double eta);

/// Keeps the diagonal, zeroes every coherence.
DensityMatrix anti_zeno_map(const DensityMatrix& rho);

/// Coherent cycle followed by the decoherence map, once per kick.
DensityEvolution run_decohered(const DensityMatrix& rho0, const PeriodOperator& U,
                               const DecoherenceModel& model, int kicks);

struct McOptions {
  int realizations = 2000;
  std::uint64_t seed = 1;
  /// Quasi-momentum grid used to cache ladder operators.
  int q_grid = 64;
  /// continuous: u ~ U[-1, 1] at a time uniform over the pulse windows.
  /// discretized: u = +-1 after the coherent cycle, the stochastic unravelling
  /// of spontaneous_emission_map.
  RecoilMode recoil = RecoilMode::continuous;
  /// Start every realization here. When empty, realizations start in random-phase
  /// states whose ensemble average is the initial Gaussian density matrix.
  std::optional<QuantumState> initial;
};

struct McResult {
  int realizations = 0;
  long emissions = 0;
  /// Mean and standard error of P(|p| > 10 pi) after each kick, index 0 initial.
  std::vector<double> outside_mean;
  std::vector<double> outside_stderr;
  /// Ensemble-averaged |amplitude|^2 per ladder index, [kick][index].
  std::vector<std::vector<double>> probabilities;
};

/// Monte Carlo wavefunction run. Per cycle, with probability eta an emission
/// happens; in continuous mode it falls at a time uniform over the pulse
/// windows and the recoil u hbar, u ~ U[-1, 1], moves the state to another ladder.
McResult mc_wavefunction_run(const KickConfig& cfg, const MomentumBasis& basis, double eta, int kicks,
                             const McOptions& options = {});

}  // namespace dkr
