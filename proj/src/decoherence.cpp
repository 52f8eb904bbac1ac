#include "dkr/decoherence.hpp"

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <random>

#include "dkr/classical.hpp"
#include "dkr/error.hpp"
#include "dkr/rng.hpp"

namespace dkr {

void EmissionModel::validate() const {
  if (!(eta >= 0.0 && eta <= 1.0)) throw ValidationError("eta", "must lie in [0, 1]");
}

DensityMatrix spontaneous_emission_map(const DensityMatrix& rho, double eta) {
  EmissionModel{eta}.validate();
  const int n = static_cast<int>(rho.elements.rows());
  DensityMatrix out{rho.basis, ComplexMatrix(n, n)};
  const auto& r = rho.elements;
  for (int b = 0; b < n; ++b) {
    const int bp = (b + 1) % n;
    const int bm = (b + n - 1) % n;
    for (int a = 0; a < n; ++a) {
      const int ap = (a + 1) % n;
      const int am = (a + n - 1) % n;
      out.elements(a, b) = 0.5 * eta * (r(ap, bp) + r(am, bm)) + (1.0 - eta) * r(a, b);
    }
  }
  return out;
}

DensityMatrix anti_zeno_map(const DensityMatrix& rho) {
  DensityMatrix out{rho.basis, ComplexMatrix::Zero(rho.elements.rows(), rho.elements.cols())};
  out.elements.diagonal() = rho.elements.diagonal();
  return out;
}

DensityEvolution run_decohered(const DensityMatrix& rho0, const PeriodOperator& U,
                               const DecoherenceModel& model, int kicks) {
  if (kicks < 0) throw ValidationError("kicks", "must be >= 0");
  if (model.kind == DecoherenceKind::spontaneous_emission) EmissionModel{model.eta}.validate();
  DensityEvolution ev;
  ev.final_state = rho0;
  ComplexMatrix tmp;
  for (int t = 0; t <= kicks; ++t) {
    if (t > 0) {
      tmp.noalias() = U.U * ev.final_state.elements;
      ev.final_state.elements.noalias() = tmp * U.U.adjoint();
      switch (model.kind) {
        case DecoherenceKind::none:
          break;
        case DecoherenceKind::spontaneous_emission:
          ev.final_state = spontaneous_emission_map(ev.final_state, model.eta);
          break;
        case DecoherenceKind::anti_zeno:
          ev.final_state = anti_zeno_map(ev.final_state);
          break;
      }
    }
    auto d = momentum_distribution(ev.final_state);
    ev.outside_fraction.push_back(d.outside);
    ev.probabilities.push_back(std::move(d.probabilities));
  }
  return ev;
}

namespace {

using namespace std::complex_literals;

struct LadderOperators {
  MomentumBasis basis;
  PulseSpectrum pulse;
  ComplexVector inner;
  ComplexVector outer;
  ComplexMatrix period;
};

// Operators for every quasi-momentum grid point, built on first use.
class LadderCache {
 public:
  LadderCache(const KickConfig& cfg, const MomentumBasis& basis, int grid)
      : cfg_(cfg), basis_(basis), grid_(grid), flags_(grid), slots_(grid) {}

  double q_of(int g) const { return -0.5 + static_cast<double>(g) / grid_; }
  int grid() const { return grid_; }

  const LadderOperators& at(int g) {
    std::call_once(flags_[g], [&] {
      MomentumBasis b = basis_;
      b.q = q_of(g);
      auto ops = std::make_unique<LadderOperators>();
      ops->basis = b;
      ops->pulse = PulseSpectrum::build(cfg_.K, b);
      ops->inner = free_phases(b, cfg_.inner_gap());
      ops->outer = free_phases(b, cfg_.outer_gap());
      const ComplexMatrix p = ops->pulse.propagator(cfg_.pulse_width());
      ops->period = ops->outer.asDiagonal() * (p * (ops->inner.asDiagonal() * p));
      slots_[g] = std::move(ops);
    });
    return *slots_[g];
  }

 private:
  KickConfig cfg_;
  MomentumBasis basis_;
  int grid_;
  std::vector<std::once_flag> flags_;
  std::vector<std::unique_ptr<LadderOperators>> slots_;
};

// Shifts total momentum by u hbar: integer part moves amplitudes along the
// ladder (periodic in N), the remainder moves the quasi-momentum grid index.
int apply_recoil(ComplexVector& psi, int g, double u, const LadderCache& cache) {
  const int grid = cache.grid();
  const double q = cache.q_of(g) + u;
  double shift = std::floor(q + 0.5);
  const double q_new = q - shift;
  long g_new = std::lround((q_new + 0.5) * grid);
  if (g_new >= grid) {
    g_new -= grid;
    shift += 1.0;
  }
  const int n = static_cast<int>(psi.size());
  const int s = ((static_cast<int>(shift) % n) + n) % n;
  if (s != 0) {
    ComplexVector moved(n);
    for (int i = 0; i < n; ++i) moved((i + s) % n) = psi(i);
    psi = std::move(moved);
  }
  return static_cast<int>(g_new);
}

double outside_of(const ComplexVector& psi, const MomentumBasis& basis) {
  double out = 0.0;
  for (int i = 0; i < basis.N; ++i) {
    if (std::abs(basis.momentum(i)) > kInnerBarrier) out += std::norm(psi(i));
  }
  return out;
}

}  // namespace

McResult mc_wavefunction_run(const KickConfig& cfg, const MomentumBasis& basis, double eta, int kicks,
                             const McOptions& options) {
  cfg.validate();
  basis.validate();
  EmissionModel{eta, RecoilMode::continuous}.validate();
  if (kicks < 0) throw ValidationError("kicks", "must be >= 0");
  if (options.realizations < 1) throw ValidationError("realizations", "must be >= 1");
  if (options.q_grid < 2 || options.q_grid % 2 != 0) throw ValidationError("q_grid", "must be even and >= 2");
  if (basis.q != 0.0) throw ValidationError("q", "Monte Carlo runs start on the q = 0 ladder");
  if (options.initial && options.initial->amplitudes.size() != basis.N) {
    throw ValidationError("initial", "state size differs from the basis");
  }

  LadderCache cache(cfg, basis, options.q_grid);
  const int g_start = options.q_grid / 2;
  const int n = basis.N;
  const double w = cfg.pulse_width();
  const std::vector<double> weights = [&] {
    const auto rho0 = initial_density(cfg, basis);
    std::vector<double> p(n);
    for (int i = 0; i < n; ++i) p[i] = rho0.elements(i, i).real();
    return p;
  }();

  // Fixed-size blocks summed in order keep results independent of threading.
  constexpr int kBlock = 64;
  const int realizations = options.realizations;
  const int blocks = (realizations + kBlock - 1) / kBlock;
  const std::size_t steps = static_cast<std::size_t>(kicks) + 1;
  std::vector<std::vector<double>> block_sum(blocks, std::vector<double>(steps, 0.0));
  std::vector<std::vector<double>> block_sq(blocks, std::vector<double>(steps, 0.0));
  std::vector<std::vector<double>> block_prob(blocks, std::vector<double>(steps * n, 0.0));
  std::vector<long> block_emissions(blocks, 0);

#pragma omp parallel for schedule(dynamic, 1)
  for (int b = 0; b < blocks; ++b) {
    const int first = b * kBlock;
    const int last = std::min(realizations, first + kBlock);
    for (int r = first; r < last; ++r) {
      auto engine = stream_engine(options.seed, static_cast<std::uint64_t>(r));
      std::uniform_real_distribution<double> unit(0.0, 1.0);

      ComplexVector psi(n);
      if (options.initial) {
        psi = options.initial->amplitudes;
      } else {
        for (int i = 0; i < n; ++i) psi(i) = std::polar(std::sqrt(weights[i]), 2.0 * kPi * unit(engine));
      }
      int g = g_start;

      for (std::size_t t = 0; t < steps; ++t) {
        if (t > 0) {
          const bool emits = unit(engine) < eta;
          if (!emits) {
            psi = cache.at(g).period * psi;
          } else if (options.recoil == RecoilMode::discretized) {
            ++block_emissions[b];
            psi = cache.at(g).period * psi;
            g = apply_recoil(psi, g, unit(engine) < 0.5 ? -1.0 : 1.0, cache);
          } else {
            ++block_emissions[b];
            const double when = cfg.alpha * unit(engine);
            const double u = 2.0 * unit(engine) - 1.0;
            const bool first_pulse = when < w;
            const double split = first_pulse ? when : when - w;
            const auto& before = cache.at(g);
            if (!first_pulse) {
              psi = before.pulse.apply(psi, w);
              psi = before.inner.cwiseProduct(psi);
            }
            psi = before.pulse.apply(psi, split);
            g = apply_recoil(psi, g, u, cache);
            const auto& after = cache.at(g);
            psi = after.pulse.apply(psi, w - split);
            if (first_pulse) {
              psi = after.inner.cwiseProduct(psi);
              psi = after.pulse.apply(psi, w);
            }
            psi = after.outer.cwiseProduct(psi);
          }
        }
        const double out = outside_of(psi, cache.at(g).basis);
        block_sum[b][t] += out;
        block_sq[b][t] += out * out;
        double* prob = block_prob[b].data() + t * n;
        for (int i = 0; i < n; ++i) prob[i] += std::norm(psi(i));
      }
    }
  }

  McResult result;
  result.realizations = realizations;
  result.outside_mean.assign(steps, 0.0);
  result.outside_stderr.assign(steps, 0.0);
  result.probabilities.assign(steps, std::vector<double>(n, 0.0));
  std::vector<double> sq(steps, 0.0);
  for (int b = 0; b < blocks; ++b) {
    result.emissions += block_emissions[b];
    for (std::size_t t = 0; t < steps; ++t) {
      result.outside_mean[t] += block_sum[b][t];
      sq[t] += block_sq[b][t];
      for (int i = 0; i < n; ++i) result.probabilities[t][i] += block_prob[b][t * n + i];
    }
  }
  const double R = realizations;
  for (std::size_t t = 0; t < steps; ++t) {
    const double mean = result.outside_mean[t] / R;
    result.outside_mean[t] = mean;
    const double var = realizations > 1 ? std::max(0.0, (sq[t] - R * mean * mean) / (R - 1.0)) : 0.0;
    result.outside_stderr[t] = std::sqrt(var / R);
    for (auto& p : result.probabilities[t]) p /= R;
  }
  return result;
}

}  // namespace dkr
