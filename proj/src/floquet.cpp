#include "dkr/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>

#include "dkr/error.hpp"

namespace dkr {

double FloquetDecomposition::reconstruction_residual(const ComplexMatrix& U) const {
  const ComplexMatrix rebuilt = vectors * eigenvalues.asDiagonal() * vectors.adjoint();
  return (U - rebuilt).cwiseAbs().maxCoeff();
}

FloquetDecomposition decompose(const PeriodOperator& op) {
  const double defect = op.unitarity_defect();
  if (defect > kUnitarityRejection) {
    throw std::runtime_error("decompose: unitarity defect " + std::to_string(defect) + " exceeds 1e-6");
  }
  // A unitary matrix is normal, so its Schur form is diagonal to rounding and
  // the Schur vectors are an orthonormal eigenbasis.
  Eigen::ComplexSchur<ComplexMatrix> schur(op.U, true);
  if (schur.info() != Eigen::Success) throw std::runtime_error("decompose: Schur iteration failed");

  FloquetDecomposition dec;
  dec.basis = op.basis;
  dec.vectors = schur.matrixU();
  dec.eigenvalues = schur.matrixT().diagonal();
  const auto n = dec.eigenvalues.size();
  const double hbar = op.basis.hbar;
  dec.quasi_energies.resize(n);
  std::vector<double> angle(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double theta = -std::arg(dec.eigenvalues(j));
    if (theta < 0.0) theta += 2.0 * kPi;
    angle[j] = theta;
    dec.quasi_energies(j) = hbar * theta;
  }

  // Neighbouring eigenphases on the circle closer than the degeneracy angle.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return angle[a] < angle[b]; });
  std::vector<std::vector<int>> clusters;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k > 0 && angle[order[k]] - angle[order[k - 1]] < kDegeneracyAngle) {
      clusters.back().push_back(order[k]);
    } else {
      clusters.push_back({order[k]});
    }
  }
  if (clusters.size() > 1 && angle[order.front()] + 2.0 * kPi - angle[order.back()] < kDegeneracyAngle) {
    clusters.front().insert(clusters.front().end(), clusters.back().begin(), clusters.back().end());
    clusters.pop_back();
  }
  for (auto& c : clusters) {
    if (c.size() > 1) dec.degenerate_clusters.push_back(std::move(c));
  }
  return dec;
}

std::vector<double> asymptotic_distribution(const FloquetDecomposition& dec, int n0) {
  const int i0 = dec.basis.index(n0);
  if (i0 < 0 || i0 >= dec.basis.N) throw ValidationError("n0", "outside the momentum basis");
  const Eigen::MatrixXd weights = dec.vectors.cwiseAbs2();
  const Eigen::VectorXd col = weights * weights.row(i0).transpose();
  return {col.data(), col.data() + col.size()};
}

Eigen::MatrixXd asymptotic_matrix(const FloquetDecomposition& dec) {
  const Eigen::MatrixXd weights = dec.vectors.cwiseAbs2();
  return weights * weights.transpose();
}

std::vector<double> asymptotic_distribution(const FloquetDecomposition& dec, const DensityMatrix& rho0) {
  const ComplexMatrix rotated = dec.vectors.adjoint() * rho0.elements * dec.vectors;
  const Eigen::VectorXd populations = rotated.diagonal().real();
  const Eigen::VectorXd p = dec.vectors.cwiseAbs2() * populations;
  return {p.data(), p.data() + p.size()};
}

}  // namespace dkr
