#include "dkr/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "dkr/error.hpp"

namespace dkr {

namespace {

constexpr double kTwoThirds = 2.0 / 3.0;

void check_flux(double F) {
  const double x = 3.0 * F / kRegionArea;
  if (!(x >= 0.0 && x < 1.0)) throw ValidationError("F", "requires 0 <= 3F/40pi^2 < 1");
}

}  // namespace

double decay_rate(double F) {
  check_flux(F);
  return std::log1p(-3.0 * F / kRegionArea);
}

double flux_from_rate(double a) { return -std::expm1(a) * kRegionArea / 3.0; }

double model_inside(double F, double t) {
  if (!(t >= 0.0)) throw ValidationError("t", "must be >= 0");
  return 1.0 / 3.0 + kTwoThirds * std::exp(decay_rate(F) * t);
}

double model_outside(double F, double t) {
  if (!(t >= 0.0)) throw ValidationError("t", "must be >= 0");
  return -kTwoThirds * std::expm1(decay_rate(F) * t);
}

DiffusionFit fit_flux(std::span<const double> series, FitWindow window) {
  if (series.size() < 10) throw ValidationError("series", "needs at least 10 kicks");
  if (window.t_min < 0 || window.t_max < window.t_min) throw ValidationError("window", "invalid range");

  DiffusionFit fit;
  fit.window = window;
  const double floor = std::exp(-3.0);
  std::vector<double> ts;
  std::vector<double> ys;
  const int last = std::min<int>(window.t_max, static_cast<int>(series.size()) - 1);
  for (int t = window.t_min; t <= last; ++t) {
    const double gap = kTwoThirds - series[t];
    if (!(gap > 0.0)) {
      ++fit.n_dropped;
      continue;
    }
    if (gap < floor) {
      ++fit.n_near_equilibrium;
      continue;
    }
    ts.push_back(t);
    ys.push_back(std::log(gap));
  }
  fit.n_used = ts.size();
  if (ts.size() < 5) return fit;

  const double n = static_cast<double>(ts.size());
  double mt = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    mt += ts[i];
    my += ys[i];
  }
  mt /= n;
  my /= n;
  double stt = 0.0;
  double sty = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - mt) * (ts[i] - mt);
    sty += (ts[i] - mt) * (ys[i] - my);
  }
  fit.a = sty / stt;
  fit.intercept = my - fit.a * mt;
  double sse = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.a * ts[i]);
    sse += r * r;
  }
  fit.residual = std::sqrt(sse / n);
  fit.F = flux_from_rate(fit.a);
  fit.accepted = true;
  fit.small_rate = std::abs(fit.a) < 0.5;
  return fit;
}

}  // namespace dkr
