#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dkr/pulse.hpp"

namespace dkr {

struct PhasePoint {
  double phi = 0.0;
  double p = 0.0;
};

struct ClassicalEnsemble {
  std::vector<PhasePoint> points;
  std::uint64_t seed = 0;
  int kick_count = 0;
};

/// Fixed binning used for every classical momentum histogram.
struct HistogramBinning {
  static constexpr int kBins = 128;
  static constexpr double kLow = -35.0 * kPi;
  static constexpr double kHigh = 35.0 * kPi;
  static constexpr double width() { return (kHigh - kLow) / kBins; }
  /// Out-of-range momenta are clamped into the edge bins.
  static int bin_of(double p);
};

struct MomentumHistogram {
  std::vector<double> bin_edges;           // kBins + 1 entries
  std::vector<std::vector<long>> counts;   // counts[kick][bin], kick 0..kicks
};

struct EnsembleRun {
  MomentumHistogram histogram;
  /// Fraction with |p| > 10 pi after each kick, index 0 is the initial ensemble.
  std::vector<double> outside_fraction;
  /// Trajectories that reached |p| > 30 pi at any strobe.
  std::size_t outer_crossings = 0;
  ClassicalEnsemble final_ensemble;
};

inline constexpr double kInnerBarrier = 10.0 * kPi;
inline constexpr double kOuterBarrier = 30.0 * kPi;

double wrap_angle(double phi);

PhasePoint free_step(PhasePoint s, double w);

/// Exact motion under H = p^2/2 - K cos(phi) for duration w. Libration and
/// rotation use Jacobi elliptic functions; states within 1e-9 K of the
/// separatrix energy go through an adaptive Runge-Kutta integrator.
PhasePoint pendulum_step(PhasePoint s, double w, double K);

/// Same motion integrated numerically (Dormand-Prince, tolerance `tol`).
PhasePoint pendulum_step_numeric(PhasePoint s, double w, double K, double tol = 1e-13);

/// One period: pulse, inner gap, pulse, outer gap.
PhasePoint kick_cycle(PhasePoint s, const KickConfig& cfg);

/// phi uniform on [0, 2 pi), p normal with spread sigma_p.
ClassicalEnsemble sample_initial(const KickConfig& cfg, std::size_t n, std::uint64_t seed);

EnsembleRun propagate_ensemble(const ClassicalEnsemble& e, const KickConfig& cfg, int kicks);

/// Strobed points of n_orbits orbits, one per period at the cycle start.
/// Initial momenta are spread uniformly over [p_min, p_max].
std::vector<PhasePoint> poincare_section(const KickConfig& cfg, int n_orbits, int n_periods,
                                         std::uint64_t seed, double p_min = -32.0 * kPi,
                                         double p_max = 32.0 * kPi);

}  // namespace dkr
