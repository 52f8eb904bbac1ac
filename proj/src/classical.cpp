#include "dkr/classical.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include <boost/numeric/odeint.hpp>

#include "dkr/elliptic.hpp"
#include "dkr/error.hpp"
#include "dkr/rng.hpp"

namespace dkr {

namespace {

constexpr double kTwoPi = 2.0 * kPi;
constexpr double kSeparatrixBand = 1e-9;

// phi in (-pi, pi]
double centred_angle(double phi) {
  double r = std::remainder(phi, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

}  // namespace

int HistogramBinning::bin_of(double p) {
  const int bin = static_cast<int>(std::floor((p - kLow) / width()));
  return std::clamp(bin, 0, kBins - 1);
}

double wrap_angle(double phi) {
  double r = std::fmod(phi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

PhasePoint free_step(PhasePoint s, double w) {
  return {wrap_angle(s.phi + s.p * w), s.p};
}

PhasePoint pendulum_step_numeric(PhasePoint s, double w, double K, double tol) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 2>;
  State x{s.phi, s.p};
  auto rhs = [K](const State& y, State& dy, double) {
    dy[0] = y[1];
    dy[1] = -K * std::sin(y[0]);
  };
  if (w > 0.0) {
    odeint::integrate_adaptive(odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(tol, tol),
                               rhs, x, 0.0, w, w / 64.0);
  }
  return {wrap_angle(x[0]), x[1]};
}

PhasePoint pendulum_step(PhasePoint s, double w, double K) {
  if (K == 0.0 || w == 0.0) return free_step(s, w);

  const double omega = std::sqrt(K);
  const double phi = centred_angle(s.phi);
  const double sh = std::sin(0.5 * phi);
  const double ch = std::cos(0.5 * phi);
  const double kinetic = s.p * s.p / (4.0 * K);
  // m = (E + K) / 2K and its complement, each formed without cancellation.
  const double m = kinetic + sh * sh;
  const double mc = ch * ch - kinetic;

  if (m == 0.0) return {wrap_angle(phi), 0.0};
  if (std::abs(mc) < 0.5 * kSeparatrixBand) return pendulum_step_numeric(s, w, K);

  if (mc > 0.0) {
    // Libration: sin(phi/2) = k sn(u), p = 2 k omega cn(u).
    const double k = std::sqrt(m);
    const double amplitude = std::atan2(sh / k, s.p / (2.0 * k * omega));
    const double u = elliptic::incomplete_f(amplitude, m, mc) + omega * w;
    const auto j = elliptic::jacobi(u, m, mc);
    return {wrap_angle(2.0 * std::atan2(k * j.sn, j.dn)), 2.0 * k * omega * j.cn};
  }

  // Rotation: phi/2 = am(v | 1/m), p = 2 sqrt(m) omega dn(v), mirrored for p < 0.
  const double sign = s.p > 0.0 ? 1.0 : -1.0;
  const double k = std::sqrt(m);
  const double rm = 1.0 / m;
  const double rmc = -mc / m;
  const double v = elliptic::incomplete_f(0.5 * sign * phi, rm, rmc) + k * omega * w;
  const auto j = elliptic::jacobi(v, rm, rmc);
  const double half = std::atan2(j.sn, j.cn);
  return {wrap_angle(2.0 * sign * half), sign * 2.0 * k * omega * j.dn};
}

PhasePoint kick_cycle(PhasePoint s, const KickConfig& cfg) {
  const double w = cfg.pulse_width();
  s = pendulum_step(s, w, cfg.K);
  s = free_step(s, cfg.inner_gap());
  s = pendulum_step(s, w, cfg.K);
  return free_step(s, cfg.outer_gap());
}

ClassicalEnsemble sample_initial(const KickConfig& cfg, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("ensemble", "must be >= 1");
  cfg.validate();
  ClassicalEnsemble e;
  e.seed = seed;
  e.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto engine = stream_engine(seed, i);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    std::normal_distribution<double> momentum(0.0, cfg.sigma_p);
    const double phi = angle(engine);
    e.points[i] = {phi, momentum(engine)};
  }
  return e;
}

EnsembleRun propagate_ensemble(const ClassicalEnsemble& e, const KickConfig& cfg, int kicks) {
  if (kicks < 1) throw ValidationError("kicks", "must be >= 1");
  cfg.validate();
  constexpr int kBins = HistogramBinning::kBins;
  const auto n = static_cast<long>(e.points.size());

  EnsembleRun run;
  run.final_ensemble = e;
  run.final_ensemble.kick_count = e.kick_count + kicks;
  auto& points = run.final_ensemble.points;

  run.histogram.bin_edges.resize(kBins + 1);
  for (int b = 0; b <= kBins; ++b) {
    run.histogram.bin_edges[b] = HistogramBinning::kLow + b * HistogramBinning::width();
  }

  // Flattened [kick][bin] and per-kick outside counts; integer reductions keep
  // the result independent of thread scheduling.
  std::vector<long> counts(static_cast<std::size_t>(kicks + 1) * kBins, 0);
  std::vector<long> outside(kicks + 1, 0);
  long crossings = 0;

#pragma omp parallel
  {
    std::vector<long> local_counts(counts.size(), 0);
    std::vector<long> local_outside(outside.size(), 0);
    long local_crossings = 0;
#pragma omp for schedule(static)
    for (long i = 0; i < n; ++i) {
      PhasePoint s = points[i];
      bool crossed = std::abs(s.p) > kOuterBarrier;
      for (int t = 0; t <= kicks; ++t) {
        if (t > 0) {
          s = kick_cycle(s, cfg);
          crossed = crossed || std::abs(s.p) > kOuterBarrier;
        }
        ++local_counts[static_cast<std::size_t>(t) * kBins + HistogramBinning::bin_of(s.p)];
        if (std::abs(s.p) > kInnerBarrier) ++local_outside[t];
      }
      points[i] = s;
      if (crossed) ++local_crossings;
    }
#pragma omp critical
    {
      for (std::size_t k = 0; k < counts.size(); ++k) counts[k] += local_counts[k];
      for (std::size_t k = 0; k < outside.size(); ++k) outside[k] += local_outside[k];
      crossings += local_crossings;
    }
  }

  run.histogram.counts.resize(kicks + 1);
  run.outside_fraction.resize(kicks + 1);
  for (int t = 0; t <= kicks; ++t) {
    const auto first = counts.begin() + static_cast<long>(t) * kBins;
    run.histogram.counts[t].assign(first, first + kBins);
    run.outside_fraction[t] = n > 0 ? static_cast<double>(outside[t]) / static_cast<double>(n) : 0.0;
  }
  run.outer_crossings = static_cast<std::size_t>(crossings);
  return run;
}

std::vector<PhasePoint> poincare_section(const KickConfig& cfg, int n_orbits, int n_periods,
                                         std::uint64_t seed, double p_min, double p_max) {
  if (n_orbits < 1) throw ValidationError("poincare_orbits", "must be >= 1");
  if (n_periods < 1) throw ValidationError("poincare_periods", "must be >= 1");
  cfg.validate();
  std::vector<PhasePoint> out(static_cast<std::size_t>(n_orbits) * n_periods);
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < n_orbits; ++i) {
    auto engine = stream_engine(seed, static_cast<std::uint64_t>(i));
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    const double frac = n_orbits > 1 ? static_cast<double>(i) / (n_orbits - 1) : 0.5;
    PhasePoint s{angle(engine), p_min + frac * (p_max - p_min)};
    for (int t = 0; t < n_periods; ++t) {
      out[static_cast<std::size_t>(i) * n_periods + t] = s;
      s = kick_cycle(s, cfg);
    }
  }
  return out;
}

}  // namespace dkr
