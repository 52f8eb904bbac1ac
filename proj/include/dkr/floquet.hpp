#pragma once

#include <vector>

#include "dkr/quantum.hpp"

namespace dkr {

struct FloquetDecomposition {
  MomentumBasis basis;
  /// E_j in [0, 2 pi hbar), with U |alpha_j> = exp(-i E_j / hbar) |alpha_j>.
  Eigen::VectorXd quasi_energies;
  Eigen::VectorXcd eigenvalues;
  /// Orthonormal eigenvectors as columns.
  ComplexMatrix vectors;
  /// Groups of indices whose eigenphases agree within 1e-10.
  std::vector<std::vector<int>> degenerate_clusters;

  bool degenerate() const { return !degenerate_clusters.empty(); }
  double reconstruction_residual(const ComplexMatrix& U) const;
};

inline constexpr double kUnitarityRejection = 1e-6;
inline constexpr double kDegeneracyAngle = 1e-10;

/// Spectral decomposition of a one-period operator via complex Schur form.
/// Throws when the unitarity defect exceeds 1e-6.
FloquetDecomposition decompose(const PeriodOperator& U);

/// P(n | n0) = sum_j |<n0|alpha_j>|^2 |<n|alpha_j>|^2 over all n.
std::vector<double> asymptotic_distribution(const FloquetDecomposition& dec, int n0);

/// Matrix with entry (row n, column n0) equal to P(n | n0).
Eigen::MatrixXd asymptotic_matrix(const FloquetDecomposition& dec);

/// Long-time limit of diag(U^t rho0 U^dagger^t) for a general initial state:
/// sum_j <alpha_j|rho0|alpha_j> |<n|alpha_j>|^2.
std::vector<double> asymptotic_distribution(const FloquetDecomposition& dec, const DensityMatrix& rho0);

}  // namespace dkr
