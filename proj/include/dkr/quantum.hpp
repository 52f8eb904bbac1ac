#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dkr/pulse.hpp"

namespace dkr {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Truncated momentum ladder n in [-N/2, N/2) with quasi-momentum offset q;
/// the physical momentum of index n is (n + q) * hbar.
struct MomentumBasis {
  int N = 128;
  double hbar = 2.6;
  double q = 0.0;

  int n_min() const { return -N / 2; }
  int label(int i) const { return i + n_min(); }
  int index(int n) const { return n - n_min(); }
  double momentum(int i) const { return (label(i) + q) * hbar; }

  void validate() const;
};

struct QuantumState {
  MomentumBasis basis;
  ComplexVector amplitudes;

  static QuantumState momentum_eigenstate(const MomentumBasis& basis, int n);
  double norm() const { return amplitudes.norm(); }
};

struct DensityMatrix {
  MomentumBasis basis;
  ComplexMatrix elements;

  static DensityMatrix pure(const QuantumState& psi);

  double trace() const { return elements.diagonal().real().sum(); }
  double hermiticity_defect() const;
  /// Smallest eigenvalue, for positivity audits.
  double min_eigenvalue() const;
};

/// Eigen-decomposition of the tridiagonal pulse Hamiltonian
/// p^2/2 on the diagonal and -K/2 on the off-diagonals.
struct PulseSpectrum {
  Eigen::VectorXd energies;
  Eigen::MatrixXd vectors;
  double hbar = 1.0;

  static PulseSpectrum build(double K, const MomentumBasis& basis);

  /// exp(-i H w / hbar) as a dense matrix.
  ComplexMatrix propagator(double w) const;
  /// exp(-i H w / hbar) applied to a vector.
  ComplexVector apply(const ComplexVector& psi, double w) const;
};

/// Diagonal of the free-rotation propagator exp(-i (n+q)^2 hbar w / 2).
ComplexVector free_phases(const MomentumBasis& basis, double w);

struct PeriodOperator {
  MomentumBasis basis;
  ComplexMatrix U;

  /// max |U^dagger U - I|
  double unitarity_defect() const;
};

struct MomentumDistribution {
  std::vector<double> probabilities;
  double outside = 0.0;
};

struct DensityEvolution {
  /// probabilities[t] for t = 0..kicks.
  std::vector<std::vector<double>> probabilities;
  std::vector<double> outside_fraction;
  DensityMatrix final_state;
};

/// Diagonal Gaussian exp(-n^2 hbar^2 / 2 sigma_p^2), trace one.
DensityMatrix initial_density(const KickConfig& cfg, const MomentumBasis& basis);

PeriodOperator build_period_operator(const KickConfig& cfg, const MomentumBasis& basis);

/// Probability on states with |(n + q) hbar| > 10 pi.
double outside_probability(const std::vector<double>& probabilities, const MomentumBasis& basis);

MomentumDistribution momentum_distribution(const DensityMatrix& rho);
MomentumDistribution momentum_distribution(const QuantumState& psi);

/// rho_t = U rho_{t-1} U^dagger, recording the diagonal after each kick.
DensityEvolution evolve_density(const DensityMatrix& rho0, const PeriodOperator& U, int kicks);

}  // namespace dkr
