#pragma once

// Half-line convolution equations u(t) - int_0^inf K(t-s) u(s) ds = f(t).
//
// Transforms use F(xi) = int f(t) exp(-i xi t) dt. The real xi axis is mapped
// to the unit circle by w = (i xi - sigma) / (i xi + sigma), so functions
// analytic in the upper half plane become functions analytic outside the
// disk. Causal functions are expanded in Laguerre functions
// exp(-sigma t) L_n(2 sigma t), whose transforms are w^n / (sigma + i xi).

#include <functional>

#include "iew/types.hpp"

namespace iew::singular {

struct WienerHopfProblem {
  ComplexFunction kernel;  ///< K(t), integrable on the line
  /// Optional closed form of K~(xi); otherwise K is integrated numerically on [-kernel_extent, kernel_extent].
  std::function<cplx(double)> symbol;
  ComplexFunction f;  ///< right-hand side on [0, inf), decaying
  double T = 20.0;    ///< solution reported on [0, T]; residual checked on [0, T/2]
  int modes = 256;    ///< circle nodes, even
  double sigma = 1.0;
  double kernel_extent = 40.0;
  double data_extent = 60.0;
  int output_points = 201;

  /// K(t) = lambda exp(-|t|), K~ = 2 lambda / (1 + xi^2).
  static WienerHopfProblem exp_abs(double lambda, ComplexFunction f);
  /// K(t) = c exp(-t) for t > 0 and 0 otherwise, K~ = c / (1 + i xi).
  static WienerHopfProblem causal_exp(double c, ComplexFunction f);
};

struct WienerHopfSolution {
  int kappa = 0;
  double sigma = 1.0;
  RealVector t;
  Vector u;
  Vector laguerre;       ///< coefficients of u
  Vector log_inside;     ///< modes n >= 0 of log K~_-, normalised to vanish at xi = inf
  Vector log_outside;    ///< modes n < 0 of log K~_+ (entry k is the mode -(k+1)), plus log_outside_const
  cplx log_outside_const = 0.0;
  double residual = 0.0;          ///< max |residual| on [0, T/2]
  double wrong_half_plane = 0.0;  ///< largest wrong-side mode of the recomputed log factors
  double tail_mode = 0.0;         ///< magnitude of the highest resolved log mode

  /// Factor analytic in the upper half plane.
  cplx factor_plus(double xi) const;
  /// Factor analytic in the lower half plane.
  cplx factor_minus(double xi) const;
  cplx evaluate(double t) const;
};

/// K~(xi) from the closed form when present, else by quadrature.
cplx kernel_symbol(const WienerHopfProblem& p, double xi);

/// kappa = -(1/2 pi) times the increment of arg(1 - K~) along the real axis.
int wiener_hopf_index(const WienerHopfProblem& p);

/// Throws NonzeroIndexError when kappa != 0.
WienerHopfSolution solve_wiener_hopf(const WienerHopfProblem& p);

/// u(t) - int_0^inf K(t - s) u(s) ds - f(t) by composite Gauss-Legendre split at s = t.
cplx wiener_hopf_residual(const WienerHopfProblem& p, const std::function<cplx(double)>& u, double t);

}  // namespace iew::singular
