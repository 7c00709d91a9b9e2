#pragma once

// Dense and matrix-free linear algebra shared by the solver modules.

#include <functional>

#include "iew/types.hpp"

namespace iew::linalg {

using MatVec = std::function<Vector(const Vector&)>;

struct GmresResult {
  Vector x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Restarted GMRES with modified Gram-Schmidt and Givens rotations.
GmresResult gmres(const MatVec& apply, const Vector& b, const Vector& x0, double tol, int max_iter,
                  int restart = 60);

/// Solves a dense square system; throws SingularSystemError with a reciprocal
/// condition estimate when the LU factorisation is numerically singular.
Vector dense_solve(const Matrix& a, const Vector& b, double rcond_floor = 1e-14);

/// Weighted singular value decomposition of a Nystrom matrix M in the inner
/// product (u, v) = sum w_i u_i conj(v_i).  With S = D^{1/2} M D^{-1/2} = U diag(s) V^H,
/// right vectors are D^{-1/2} V and left vectors are D^{-1/2} U.
struct WeightedSvd {
  RealVector s;
  Matrix left;   ///< columns orthonormal in the weighted product
  Matrix right;  ///< columns orthonormal in the weighted product
};
WeightedSvd weighted_svd(const Matrix& m, const RealVector& weights);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const RealVector& x, const RealVector& y);

}  // namespace iew::linalg
