#pragma once

// The exponential covariance kernel exp(-|x-y|) on [-1, 1]: closed-form
// distributional solution of int R(x,y) h(y) dy = f(x) and its forward check,
// plus the power-law decay of the operator's eigenvalues.

#include <optional>
#include <utility>

#include "iew/grid_quad.hpp"

namespace iew::estimation {

struct EstimationProblem {
  RealFunction f;
  /// Analytic derivatives; Chebyshev differentiation on 64 points otherwise.
  RealFunction df;
  RealFunction d2f;
};

/// Regular density plus delta atoms at the endpoints.
struct DistributionalSolution {
  RealFunction regular;  ///< (-f'' + f) / 2
  double atom_right = 0.0;  ///< weight of delta(x - 1)
  double atom_left = 0.0;   ///< weight of delta(x + 1)
  int ordsing = 0;
  // Symbol data of the kernel class: R~ = P(lambda) / Q(lambda) with P = 1,
  // Q = (lambda^2 + 1) / 2, so p = 0, q = 2, s = r = 1 and alpha = 1.
  int p = 0, q = 2, s = 1, r = 1;
  double alpha = 1.0;

  RealVector sample_regular(const quad::QuadRule& rule) const;
};

DistributionalSolution solve_exp_kernel(const EstimationProblem& p);

/// int_{-1}^{1} exp(-|x-y|) h(y) dy, the regular part by Gauss-Legendre of
/// the rule's order on [-1, x] and [x, 1].
double apply_R(const DistributionalSolution& h, double x, const quad::QuadRule& rule);

/// Least-squares slope of log lambda_j against log j for j in [j_lo, j_hi] (1-based).
double decay_exponent(const quad::DiscreteOperator& op, int j_lo, int j_hi);

/// f' and f'' at x from the Chebyshev interpolant of f on 64 points.
std::pair<double, double> chebyshev_derivatives(const RealFunction& f, double x);

}  // namespace iew::estimation
