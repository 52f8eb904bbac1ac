#include "dkr/wigner.hpp"

#include <cmath>
#include <complex>
#include <mutex>

#include <fftw3.h>

#include "dkr/decoherence.hpp"
#include "dkr/error.hpp"

namespace dkr {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int floor_mod(int a, int n) { return ((a % n) + n) % n; }

}  // namespace

double WignerGrid::raw_position(int k) const { return kPi * k / N; }
double WignerGrid::raw_momentum(int r) const { return 0.5 * hbar * (r - N); }
double WignerGrid::coarse_position(int c) const { return 2.0 * kPi * c / N; }
double WignerGrid::coarse_momentum(int i) const { return hbar * (i - N / 2); }

WignerGrid wigner_transform(const DensityMatrix& rho) {
  const int n = rho.basis.N;
  if (rho.elements.rows() != n || rho.elements.cols() != n) {
    throw ValidationError("rho", "matrix size differs from the basis");
  }
  const int m = 2 * n;
  const int n_min = rho.basis.n_min();

  WignerGrid grid;
  grid.N = n;
  grid.hbar = rho.basis.hbar;
  grid.raw.resize(m, m);

  fftw_complex* buffer = fftw_alloc_complex(m);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(m, buffer, buffer, FFTW_BACKWARD, FFTW_ESTIMATE);
  }

  for (int r = 0; r < m; ++r) {
    const int l = r - n;
    for (int j = 0; j < m; ++j) {
      std::complex<double> v = 0.0;
      if (((l + j) & 1) == 0) {
        // Half-integer labels are excluded by the parity factor; the rest
        // wrap onto the torus of ladder labels.
        const int bra = floor_mod((l + j) / 2 - n_min, n);
        const int ket = floor_mod((l - j) / 2 - n_min, n);
        v = rho.elements(bra, ket);
      }
      buffer[j][0] = v.real();
      buffer[j][1] = v.imag();
    }
    fftw_execute(plan);
    for (int k = 0; k < m; ++k) {
      grid.raw(r, k) = buffer[k][0];
      grid.max_imaginary = std::max(grid.max_imaginary, std::abs(buffer[k][1]));
    }
  }

  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(buffer);

  grid.coarse.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < n; ++c) {
      grid.coarse(i, c) = 0.25 * grid.raw.block<2, 2>(2 * i, 2 * c).sum();
    }
  }
  const double total = grid.coarse.sum();
  if (!(std::abs(total) > 0.0)) throw std::runtime_error("wigner_transform: zero-trace density matrix");
  grid.scale = 1.0 / total;
  grid.coarse *= grid.scale;
  return grid;
}

double strangeness(const WignerGrid& grid) {
  return (grid.coarse.cwiseAbs() - grid.coarse).sum();
}

std::vector<StrangenessRow> strangeness_sweep(const KickConfig& base, const MomentumBasis& basis,
                                              const std::vector<double>& K_values,
                                              const std::vector<double>& eta_values, int kicks) {
  std::vector<StrangenessRow> rows;
  for (double K : K_values) {
    KickConfig cfg = base;
    cfg.K = K;
    const auto rho0 = initial_density(cfg, basis);
    const auto U = build_period_operator(cfg, basis);
    for (double eta : eta_values) {
      const DecoherenceModel model{eta > 0.0 ? DecoherenceKind::spontaneous_emission : DecoherenceKind::none, eta};
      const auto ev = run_decohered(rho0, U, model, kicks);
      rows.push_back({K, eta, strangeness(wigner_transform(ev.final_state))});
    }
  }
  return rows;
}

}  // namespace dkr
