#pragma once

#include <cstddef>
#include <span>

namespace dkr {

/// Phase-space area of each of the three momentum regions.
inline constexpr double kRegionArea = 40.0 * 3.14159265358979323846 * 3.14159265358979323846;

struct FitWindow {
  int t_min = 5;
  int t_max = 50;
};

struct DiffusionFit {
  double F = 0.0;
  double a = 0.0;
  FitWindow window;
  double residual = 0.0;
  double intercept = 0.0;
  /// Points with P_out >= 2/3 (log undefined) dropped from the fit.
  std::size_t n_dropped = 0;
  /// Points inside the window removed by the proximity-to-equilibrium rule.
  std::size_t n_near_equilibrium = 0;
  std::size_t n_used = 0;
  /// False when fewer than five usable points remained.
  bool accepted = false;
  /// |a| < 0.5, the regime where the three-region model is meaningful.
  bool small_rate = false;
};

/// Per-kick decay rate a = ln(1 - 3F / 40 pi^2).
double decay_rate(double F);

/// Inverse of decay_rate.
double flux_from_rate(double a);

/// P(|p| < 10 pi, t) = 1/3 + 2/3 (1 - 3F/40pi^2)^t.
double model_inside(double F, double t);

/// P(|p| > 10 pi, t) = 2/3 (1 - e^{a t}).
double model_outside(double F, double t);

/// Least-squares line through ln(2/3 - P_out(t)) over the window; series[t] is P_out after t kicks.
DiffusionFit fit_flux(std::span<const double> series, FitWindow window = {});

}  // namespace dkr
