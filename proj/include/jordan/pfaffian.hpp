#ifndef JORDAN_PFAFFIAN_HPP
#define JORDAN_PFAFFIAN_HPP

#include <cmath>
#include <utility>

#include "jordan/error.hpp"
#include "jordan/linalg.hpp"

namespace jordan {

// Pfaffian by Parlett-Reid skew tridiagonalization with row/column pivoting.
// Normalized so that pf([[0, 1], [-1, 0]]) = 1.
template <class Scalar>
Scalar pfaffian(MatrixT<Scalar> a, double skew_tol = 1e-10) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw UsageError("pfaffian: matrix is not square");
  if (n % 2) throw UsageError("pfaffian: matrix has odd size");
  double scale = n ? a.cwiseAbs().maxCoeff() : 0.0;
  if ((a + a.transpose()).cwiseAbs().maxCoeff() > skew_tol * std::max(1.0, scale))
    throw UsageError("pfaffian: matrix is not skew-symmetric");
  Scalar pf(1);
  for (Eigen::Index k = 0; k + 1 < n; k += 2) {
    Eigen::Index kp;
    a.col(k).tail(n - k - 1).cwiseAbs().maxCoeff(&kp);
    kp += k + 1;
    if (kp != k + 1) {
      a.row(k + 1).swap(a.row(kp));
      a.col(k + 1).swap(a.col(kp));
      pf = -pf;
    }
    if (a(k + 1, k) == Scalar(0)) return Scalar(0);
    pf *= a(k, k + 1);
    if (k + 2 < n) {
      const Eigen::Index m = n - k - 2;
      VectorT<Scalar> tau = a.row(k).tail(m).transpose() / a(k, k + 1);
      VectorT<Scalar> col = a.col(k + 1).tail(m);
      a.bottomRightCorner(m, m) += tau * col.transpose() - col * tau.transpose();
    }
  }
  return pf;
}

}  // namespace jordan

#endif  // JORDAN_PFAFFIAN_HPP
