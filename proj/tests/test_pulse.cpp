#include <doctest.h>

#include <cmath>
#include <complex>

#include "dkr/error.hpp"
#include "dkr/pulse.hpp"

using namespace dkr;

TEST_CASE("fourier coefficients at the default pulse") {
  const KickConfig cfg;
  CHECK(fourier_coefficient(cfg, 0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(std::abs(fourier_coefficient(cfg, 5)) < 1e-15);
  CHECK(std::abs(fourier_coefficient(cfg, 15)) < 1e-15);
  // 0.1 * sin(pi/2)/(pi/2) * cos(pi)
  CHECK(fourier_coefficient(cfg, 10) == doctest::Approx(-0.1 * 2.0 / kPi).epsilon(1e-14));
}

TEST_CASE("coefficients are even in m") {
  const KickConfig cfg{0.0, 0.13, 0.31};
  for (int m = 1; m < 40; ++m) CHECK(fourier_coefficient(cfg, m) == fourier_coefficient(cfg, -m));
}

TEST_CASE("coefficients match numerical quadrature of the centred train") {
  // a_m = integral over one period of f(t) cos(2 pi m (t - t_c)).
  const KickConfig cfg{0.0, 0.12, 0.37};
  const double tc = 0.5 * (cfg.delta + 0.5 * cfg.alpha);
  for (int m : {0, 1, 3, 7, 12}) {
    const int steps = 200000;
    double sum = 0.0;
    for (int i = 0; i < steps; ++i) {
      const double t = (i + 0.5) / steps;
      sum += pulse_value(cfg, t) * std::cos(2.0 * kPi * m * (t - tc));
    }
    CHECK(fourier_coefficient(cfg, m) == doctest::Approx(sum / steps).epsilon(1e-4));
  }
}

TEST_CASE("pulse windows") {
  const KickConfig cfg;
  CHECK(pulse_value(cfg, 0.01) == 1);
  CHECK(pulse_value(cfg, 0.07) == 0);
  CHECK(pulse_value(cfg, 0.12) == 1);
  CHECK(pulse_value(cfg, 0.5) == 0);
  const auto profile = PulseProfile::double_pulse(cfg);
  REQUIRE(profile.windows.size() == 2);
  CHECK(profile.windows[1].first == doctest::Approx(0.1));
  CHECK(profile.windows[1].second == doctest::Approx(0.15));
  CHECK(profile.on_time() == doctest::Approx(cfg.alpha));
}

TEST_CASE("partial Fourier sums converge away from edges") {
  const KickConfig cfg;
  CHECK(std::abs(reconstruct_profile(cfg, 0.07, 2000)) < 0.01);
  CHECK(std::abs(reconstruct_profile(cfg, 0.02, 2000) - 1.0) < 0.01);
  CHECK(std::abs(reconstruct_profile(cfg, 0.125, 2000) - 1.0) < 0.01);
  CHECK(std::abs(reconstruct_profile(cfg, 0.6, 2000)) < 0.01);
}

TEST_CASE("fifth harmonic is absent from the reconstruction") {
  const KickConfig cfg;
  const int steps = 4000;
  std::complex<double> c5 = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double t = (i + 0.5) / steps;
    c5 += reconstruct_profile(cfg, t, 30) * std::exp(std::complex<double>(0.0, -2.0 * kPi * 5 * t));
  }
  CHECK(std::abs(c5) / steps < 1e-12);
}

TEST_CASE("config validation names the field") {
  KickConfig cfg;
  cfg.delta = 0.01;
  try {
    cfg.validate();
    FAIL("expected rejection");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "delta");
  }
  cfg = KickConfig{};
  cfg.delta = 0.96;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = KickConfig{};
  cfg.alpha = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = KickConfig{};
  cfg.K = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  CHECK_NOTHROW(KickConfig{}.validate());
}

TEST_CASE("sinc near zero") {
  CHECK(sinc(0.0) == 1.0);
  CHECK(sinc(1e-5) == doctest::Approx(std::sin(1e-5) / 1e-5).epsilon(1e-15));
  CHECK(sinc(kPi) == doctest::Approx(0.0).epsilon(1e-15));
}
