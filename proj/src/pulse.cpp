#include "dkr/pulse.hpp"

#include <cmath>

#include "dkr/error.hpp"

namespace dkr {

void KickConfig::validate() const {
  if (!(K >= 0.0) || !std::isfinite(K)) throw ValidationError("K", "must be finite and >= 0");
  if (!(alpha > 0.0)) throw ValidationError("alpha", "must be > 0");
  if (!(delta >= 0.5 * alpha)) throw ValidationError("delta", "pulses overlap (delta < alpha/2)");
  if (!(delta + 0.5 * alpha <= 1.0)) throw ValidationError("delta", "second pulse exceeds the period");
  if (!(hbar > 0.0)) throw ValidationError("hbar", "must be > 0");
  if (!(sigma_p > 0.0)) throw ValidationError("sigma_p", "must be > 0");
}

PulseProfile PulseProfile::double_pulse(const KickConfig& cfg) {
  const double w = cfg.pulse_width();
  return PulseProfile{{{0.0, w}, {cfg.delta, cfg.delta + w}}};
}

double PulseProfile::on_time() const {
  double total = 0.0;
  for (const auto& [start, end] : windows) total += end - start;
  return total;
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

double fourier_coefficient(const KickConfig& cfg, int m) {
  const double mm = static_cast<double>(m);
  return cfg.alpha * sinc(0.5 * mm * kPi * cfg.alpha) * std::cos(mm * kPi * cfg.delta);
}

int pulse_value(const KickConfig& cfg, double t) {
  for (const auto& [start, end] : PulseProfile::double_pulse(cfg).windows) {
    if (t >= start && t < end) return 1;
  }
  return 0;
}

double reconstruct_profile(const KickConfig& cfg, double t, int m_max) {
  // The cosine series is centred midway between the two pulse centres.
  const double centre = 0.5 * (cfg.delta + 0.5 * cfg.alpha);
  double sum = fourier_coefficient(cfg, 0);
  for (int m = 1; m <= m_max; ++m) {
    sum += 2.0 * fourier_coefficient(cfg, m) * std::cos(2.0 * kPi * m * (t - centre));
  }
  return sum;
}

}  // namespace dkr
