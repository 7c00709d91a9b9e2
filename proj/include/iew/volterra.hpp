#pragma once

// Volterra equations u(x) = mu int_a^x K(x,y) u(y) dy + f(x) with the
// trapezoid rule on the triangle a <= y <= x.

#include "iew/fredholm2.hpp"
#include "iew/grid_quad.hpp"

namespace iew::volterra {

struct VolterraProblem {
  quad::Kernel kernel = quad::Kernel::constant(1.0);
  cplx mu = 1.0;
  ComplexFunction f;
  double a = 0.0;
  double b = 1.0;
  int n = 201;  ///< trapezoid nodes, n >= 8
};

struct VolterraSolution {
  RealVector nodes;
  Vector u;
  int n_used = 0;  ///< may exceed the requested n after a retry
};

/// Forward substitution. A vanishing diagonal 1 - mu K(x_i,x_i) h/2 doubles
/// the grid, at most three times.
VolterraSolution solve_direct(const VolterraProblem& p);

/// Picard iteration u_{k+1} = mu V u_k + f from u_1 = f, stopped on the sup
/// norm of successive differences, scaled by max(1, |u|_inf).
/// residual_history holds the unscaled differences.
fredholm::IterativeReport solve_picard(const VolterraProblem& p, int max_iter = 500, double tol = 1e-13);

RealVector nodes(const VolterraProblem& p);

/// Full Nystrom matrix with the kernel zeroed above the diagonal and the
/// triangle weights, for use with the Fredholm solvers.
quad::DiscreteOperator nystrom_matrix(const VolterraProblem& p);

}  // namespace iew::volterra
