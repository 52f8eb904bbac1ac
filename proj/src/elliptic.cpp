#include "dkr/elliptic.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "dkr/pulse.hpp"

namespace dkr::elliptic {

double carlson_rf(double x, double y, double z) {
  if (x < 0.0 || y < 0.0 || z < 0.0) throw std::domain_error("carlson_rf: negative argument");
  // Duplication until the arguments agree to ~eps^(1/6); the fifth-order
  // series then carries the error below double precision.
  constexpr double kTol = 1e-3;
  for (int iter = 0; iter < 200; ++iter) {
    const double mu = (x + y + z) / 3.0;
    const double dx = (mu - x) / mu;
    const double dy = (mu - y) / mu;
    const double dz = (mu - z) / mu;
    if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) < kTol) {
      const double e2 = dx * dy - dz * dz;
      const double e3 = dx * dy * dz;
      return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / std::sqrt(mu);
    }
    const double sx = std::sqrt(x);
    const double sy = std::sqrt(y);
    const double sz = std::sqrt(z);
    const double lambda = sx * (sy + sz) + sy * sz;
    x = 0.25 * (x + lambda);
    y = 0.25 * (y + lambda);
    z = 0.25 * (z + lambda);
  }
  throw std::runtime_error("carlson_rf: no convergence");
}

double complete_k(double mc) {
  if (!(mc > 0.0)) throw std::domain_error("complete_k: requires m < 1");
  double a = 1.0;
  double b = std::sqrt(mc);
  while (std::abs(a - b) > 1e-15 * a) {
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return kPi / (a + b);
}

double incomplete_f(double phi, [[maybe_unused]] double m, double mc) {
  const double turns = std::round(phi / kPi);
  const double r = phi - turns * kPi;
  const double s = std::sin(r);
  const double c = std::cos(r);
  // 1 - m s^2 written as c^2 + mc s^2 stays accurate as m -> 1.
  const double partial = s * carlson_rf(c * c, c * c + mc * s * s, 1.0);
  if (turns == 0.0) return partial;
  return 2.0 * turns * complete_k(mc) + partial;
}

Jacobi jacobi(double u, double m, double mc) {
  if (m == 0.0) return {std::sin(u), std::cos(u), 1.0};
  if (mc == 0.0) {
    const double sech = 1.0 / std::cosh(u);
    return {std::tanh(u), sech, sech};
  }

  constexpr int kMaxLevels = 32;
  std::array<double, kMaxLevels> a{};
  std::array<double, kMaxLevels> c{};
  a[0] = 1.0;
  double b = std::sqrt(mc);
  c[0] = std::sqrt(m);
  int n = 0;
  while (std::abs(c[n]) > 1e-16 * a[n] && n + 1 < kMaxLevels) {
    a[n + 1] = 0.5 * (a[n] + b);
    c[n + 1] = 0.5 * (a[n] - b);
    b = std::sqrt(a[n] * b);
    ++n;
  }

  const double quarter = kPi / (2.0 * a[n]);
  const double period = 4.0 * quarter;
  u = std::remainder(u, period);

  double phase = std::ldexp(a[n] * u, n);
  for (int i = n; i > 0; --i) {
    phase = 0.5 * (phase + std::asin(c[i] / a[i] * std::sin(phase)));
  }
  const double sn = std::sin(phase);
  const double cn = std::cos(phase);
  const double dn = std::sqrt(mc + m * cn * cn);
  return {sn, cn, dn};
}

}  // namespace dkr::elliptic
