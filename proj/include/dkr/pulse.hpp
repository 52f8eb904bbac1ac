#pragma once

#include <utility>
#include <vector>

namespace dkr {

inline constexpr double kPi = 3.14159265358979323846;

/// Dimensionless parameters of the double-kicked rotor. The kick period is 1.
struct KickConfig {
  double K = 0.0;
  double alpha = 0.1;
  double delta = 0.1;
  double hbar = 2.6;
  double sigma_p = 3.6 * kPi;

  double pulse_width() const { return 0.5 * alpha; }
  /// Free flight between the trailing edge of pulse one and the leading edge of pulse two.
  double inner_gap() const { return delta - 0.5 * alpha; }
  /// Free flight from the trailing edge of pulse two to the end of the period.
  double outer_gap() const { return 1.0 - delta - 0.5 * alpha; }

  /// Throws ValidationError naming the first offending field.
  void validate() const;
};

/// On-intervals of the drive within one period, first pulse starting at t = 0.
struct PulseProfile {
  std::vector<std::pair<double, double>> windows;

  static PulseProfile double_pulse(const KickConfig& cfg);
  double on_time() const;
};

double sinc(double x);

/// Cosine-series coefficient a_m of the centred double pulse train:
/// alpha * sinc(m pi alpha / 2) * cos(m pi delta).
double fourier_coefficient(const KickConfig& cfg, int m);

/// f(t) for t in [0, 1): 1 inside a pulse window, 0 otherwise.
int pulse_value(const KickConfig& cfg, double t);

/// Partial Fourier sum of f(t) over |m| <= m_max.
double reconstruct_profile(const KickConfig& cfg, double t, int m_max);

}  // namespace dkr
