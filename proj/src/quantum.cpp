#include "dkr/quantum.hpp"

#include <cmath>
#include <complex>

#include "dkr/classical.hpp"
#include "dkr/error.hpp"

namespace dkr {

using namespace std::complex_literals;

void MomentumBasis::validate() const {
  if (N < 4 || N % 2 != 0) throw ValidationError("N", "must be even and >= 4");
  if (!(hbar > 0.0)) throw ValidationError("hbar", "must be > 0");
  if (!(q >= -0.5 && q < 0.5)) throw ValidationError("q", "must lie in [-1/2, 1/2)");
}

QuantumState QuantumState::momentum_eigenstate(const MomentumBasis& basis, int n) {
  const int i = basis.index(n);
  if (i < 0 || i >= basis.N) throw ValidationError("n", "outside the momentum basis");
  QuantumState psi{basis, ComplexVector::Zero(basis.N)};
  psi.amplitudes(i) = 1.0;
  return psi;
}

DensityMatrix DensityMatrix::pure(const QuantumState& psi) {
  return {psi.basis, psi.amplitudes * psi.amplitudes.adjoint()};
}

double DensityMatrix::hermiticity_defect() const {
  return (elements - elements.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  const ComplexMatrix h = 0.5 * (elements + elements.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

PulseSpectrum PulseSpectrum::build(double K, const MomentumBasis& basis) {
  basis.validate();
  Eigen::VectorXd diag(basis.N);
  for (int i = 0; i < basis.N; ++i) {
    const double p = basis.momentum(i);
    diag(i) = 0.5 * p * p;
  }
  const Eigen::VectorXd sub = Eigen::VectorXd::Constant(basis.N - 1, -0.5 * K);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  return {solver.eigenvalues(), solver.eigenvectors(), basis.hbar};
}

ComplexMatrix PulseSpectrum::propagator(double w) const {
  const ComplexVector phases = (-1i * w / hbar * energies.cast<std::complex<double>>()).array().exp();
  const ComplexMatrix v = vectors.cast<std::complex<double>>();
  return v * phases.asDiagonal() * v.transpose();
}

ComplexVector PulseSpectrum::apply(const ComplexVector& psi, double w) const {
  ComplexVector c = vectors.transpose().cast<std::complex<double>>() * psi;
  for (Eigen::Index j = 0; j < c.size(); ++j) c(j) *= std::exp(-1i * (w / hbar * energies(j)));
  return vectors.cast<std::complex<double>>() * c;
}

ComplexVector free_phases(const MomentumBasis& basis, double w) {
  ComplexVector d(basis.N);
  for (int i = 0; i < basis.N; ++i) {
    const double nq = basis.label(i) + basis.q;
    d(i) = std::exp(-1i * (0.5 * nq * nq * basis.hbar * w));
  }
  return d;
}

double PeriodOperator::unitarity_defect() const {
  const ComplexMatrix g = U.adjoint() * U - ComplexMatrix::Identity(U.rows(), U.cols());
  return g.cwiseAbs().maxCoeff();
}

DensityMatrix initial_density(const KickConfig& cfg, const MomentumBasis& basis) {
  cfg.validate();
  basis.validate();
  DensityMatrix rho{basis, ComplexMatrix::Zero(basis.N, basis.N)};
  double total = 0.0;
  for (int i = 0; i < basis.N; ++i) {
    const double n = basis.label(i);
    const double w = std::exp(-n * n * basis.hbar * basis.hbar / (2.0 * cfg.sigma_p * cfg.sigma_p));
    rho.elements(i, i) = w;
    total += w;
  }
  rho.elements /= total;
  return rho;
}

PeriodOperator build_period_operator(const KickConfig& cfg, const MomentumBasis& basis) {
  cfg.validate();
  const auto spectrum = PulseSpectrum::build(cfg.K, basis);
  const ComplexMatrix pulse = spectrum.propagator(cfg.pulse_width());
  const ComplexVector inner = free_phases(basis, cfg.inner_gap());
  const ComplexVector outer = free_phases(basis, cfg.outer_gap());
  const ComplexMatrix first = inner.asDiagonal() * pulse;
  PeriodOperator op{basis, outer.asDiagonal() * (pulse * first)};
  return op;
}

double outside_probability(const std::vector<double>& probabilities, const MomentumBasis& basis) {
  double out = 0.0;
  for (int i = 0; i < basis.N; ++i) {
    if (std::abs(basis.momentum(i)) > kInnerBarrier) out += probabilities[i];
  }
  return out;
}

MomentumDistribution momentum_distribution(const DensityMatrix& rho) {
  MomentumDistribution d;
  d.probabilities.resize(rho.basis.N);
  for (int i = 0; i < rho.basis.N; ++i) d.probabilities[i] = rho.elements(i, i).real();
  d.outside = outside_probability(d.probabilities, rho.basis);
  return d;
}

MomentumDistribution momentum_distribution(const QuantumState& psi) {
  MomentumDistribution d;
  d.probabilities.resize(psi.basis.N);
  for (int i = 0; i < psi.basis.N; ++i) d.probabilities[i] = std::norm(psi.amplitudes(i));
  d.outside = outside_probability(d.probabilities, psi.basis);
  return d;
}

DensityEvolution evolve_density(const DensityMatrix& rho0, const PeriodOperator& U, int kicks) {
  if (kicks < 0) throw ValidationError("kicks", "must be >= 0");
  if (rho0.elements.rows() != U.U.rows()) throw ValidationError("N", "density matrix and operator sizes differ");
  DensityEvolution ev;
  ev.final_state = rho0;
  ComplexMatrix& rho = ev.final_state.elements;
  ComplexMatrix tmp(rho.rows(), rho.cols());
  for (int t = 0; t <= kicks; ++t) {
    if (t > 0) {
      tmp.noalias() = U.U * rho;
      rho.noalias() = tmp * U.U.adjoint();
    }
    auto d = momentum_distribution(ev.final_state);
    ev.outside_fraction.push_back(d.outside);
    ev.probabilities.push_back(std::move(d.probabilities));
  }
  return ev;
}

}  // namespace dkr
