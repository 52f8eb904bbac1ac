#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dkr/quantum.hpp"

namespace dkr {

/// Toroidal Wigner function on a 2N x 2N grid and its 2x2 coarse-grained N x N form.
///
/// Raw row r holds P_l = (hbar/2) l with l = r - N; raw column k holds X_k = pi k / N.
/// Coarse row i pairs raw rows 2i and 2i+1, so it sits on ladder index i of the
/// basis; coarse column c pairs raw columns 2c and 2c+1.
struct WignerGrid {
  int N = 0;
  double hbar = 0.0;
  Eigen::MatrixXd raw;
  Eigen::MatrixXd coarse;
  /// Factor applied to the cell averages so that the coarse grid sums to one.
  double scale = 0.0;
  /// Largest imaginary part discarded when realizing the transform.
  double max_imaginary = 0.0;

  double raw_position(int k) const;
  double raw_momentum(int r) const;
  double coarse_position(int c) const;
  double coarse_momentum(int i) const;
};

WignerGrid wigner_transform(const DensityMatrix& rho);

/// Sum over the coarse grid of |W| - W, i.e. twice its negative mass.
double strangeness(const WignerGrid& grid);

struct StrangenessRow {
  double K = 0.0;
  double eta = 0.0;
  double S = 0.0;
};

/// S of the state after `kicks` cycles from the initial Gaussian density matrix,
/// with spontaneous emission at rate eta, for every (K, eta) pair.
std::vector<StrangenessRow> strangeness_sweep(const KickConfig& base, const MomentumBasis& basis,
                                              const std::vector<double>& K_values,
                                              const std::vector<double>& eta_values, int kicks = 20);

}  // namespace dkr
