#pragma once

// Elliptic integrals and Jacobi elliptic functions of real argument.
//
// Every routine takes the parameter m = k^2 together with its complement
// mc = 1 - m. Callers near the separatrix can form mc without cancellation,
// which is where the pendulum solution is most sensitive.

namespace dkr::elliptic {

/// Carlson's symmetric integral R_F(x, y, z), at most one argument zero.
double carlson_rf(double x, double y, double z);

/// Complete integral of the first kind K(m), 0 <= m < 1, by the AGM.
double complete_k(double mc);

/// Incomplete integral of the first kind F(phi | m) for any real phi.
/// Uses F(phi + n pi) = F(phi) + 2 n K.
double incomplete_f(double phi, double m, double mc);

struct Jacobi {
  double sn;
  double cn;
  double dn;
};

/// sn, cn, dn of (u | m) for 0 <= m <= 1 by descending Landen (AGM) iteration.
/// The argument is reduced modulo 4K before the iteration.
Jacobi jacobi(double u, double m, double mc);

}  // namespace dkr::elliptic
