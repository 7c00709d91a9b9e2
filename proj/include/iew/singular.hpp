#pragma once

// Singular integral machinery on the unit circle: the Cauchy operator S,
// boundary values of Cauchy integrals, winding numbers, the Riemann boundary
// problem and the dominant singular equation. Also the full-line convolution
// equation solved by discrete Fourier division.

#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "iew/types.hpp"

namespace iew::singular {

/// A band-limited function on the unit circle held as samples at the
/// equispaced nodes z_j = exp(2 pi i j / M), M even. Modes run over
/// -M/2 <= n < M/2; the Nyquist mode counts as negative.
class CircleFunction {
 public:
  CircleFunction() = default;

  static CircleFunction from_samples(Vector samples);
  static CircleFunction from_modes(const std::map<int, cplx>& modes, int size);
  static CircleFunction from_function(const std::function<cplx(cplx)>& g, int size);
  static CircleFunction constant(cplx c, int size);
  /// c z^n
  static CircleFunction monomial(int n, int size, cplx c = 1.0);

  int size() const { return static_cast<int>(samples_.size()); }
  const Vector& samples() const { return samples_; }
  static cplx node(int j, int size);

  /// Coefficient of z^n.
  cplx mode(int n) const;
  /// All coefficients in FFT order (0, 1, ..., M/2-1, -M/2, ..., -1).
  Vector modes() const;

  /// Laurent sum evaluated anywhere in the plane, |z| > 0.
  cplx operator()(cplx z) const;
  /// Sum over n >= 0 only (analytic inside), and over n < 0 only (analytic outside).
  cplx eval_inside(cplx z) const;
  cplx eval_outside(cplx z) const;

  /// Zero-padded (or truncated) trigonometric resampling.
  CircleFunction resampled(int new_size) const;
  CircleFunction nonnegative_part() const;
  CircleFunction negative_part() const;

  double max_abs() const { return samples_.size() ? samples_.cwiseAbs().maxCoeff() : 0.0; }

  CircleFunction operator+(const CircleFunction& o) const;
  CircleFunction operator-(const CircleFunction& o) const;
  CircleFunction operator*(const CircleFunction& o) const;
  CircleFunction operator/(const CircleFunction& o) const;
  CircleFunction operator*(cplx c) const;
  CircleFunction operator-() const;

 private:
  explicit CircleFunction(Vector s) : samples_(std::move(s)) {}
  void same_size(const CircleFunction& o) const;

  Vector samples_;
};

/// S z^n = sign(n) z^n with sign(0) = +1.
CircleFunction cauchy_apply(const CircleFunction& u);

/// Interior and exterior boundary values of the Cauchy integral of u:
/// phi_plus = nonnegative modes, phi_minus = -(negative modes).
std::pair<CircleFunction, CircleFunction> plemelj_limits(const CircleFunction& u);

/// Winding number of g about 0, refining the sampling dyadically until every
/// argument increment is below pi/2.
int winding_number(const CircleFunction& g);

/// Index of a u + b S u: winding of (a - b) / (a + b).
int index(const CircleFunction& a, const CircleFunction& b);

struct RiemannProblem {
  CircleFunction G;  ///< nowhere zero
  CircleFunction g;
};

struct RiemannSolution {
  int kappa = 0;
  CircleFunction X_plus;   ///< exp(Gamma_plus)
  CircleFunction X_minus;  ///< z^{-kappa} exp(Gamma_minus)
  CircleFunction Gamma_plus;
  CircleFunction Gamma_minus;
  /// Particular solution (free polynomial P = 0).
  CircleFunction phi_plus;
  CircleFunction phi_minus;
  /// Homogeneous solutions (X_plus z^k, X_minus z^k), k = 0..kappa, when kappa >= 0.
  std::vector<std::pair<CircleFunction, CircleFunction>> homogeneous;
  int free_poly_degree = -1;
  /// Coefficients of z^{-k}, k = 1..-kappa-1, of g / X_plus; all must vanish (kappa < -1).
  std::vector<cplx> solvability_conditions;
  bool solvable = true;
  double boundary_residual = 0.0;  ///< max |phi+ - G phi- - g| on the nodes
};

RiemannSolution solve_riemann(const RiemannProblem& p, double condition_tol = 1e-8);

struct DominantSolution {
  CircleFunction u;
  int kappa = 0;
  int free_parameters = 0;
  /// Basis densities of the homogeneous equation (kappa > 0).
  std::vector<CircleFunction> homogeneous;
  std::vector<cplx> solvability_conditions;  ///< kappa < 0
  bool solvable = true;
  double residual = 0.0;  ///< max |a u + b S u - f| on the nodes
};

/// a u + b S u = f through the Riemann problem with G = (a-b)/(a+b),
/// g = f/(a+b), and u = phi_plus - phi_minus.
DominantSolution solve_dominant(const CircleFunction& a, const CircleFunction& b, const CircleFunction& f,
                                double condition_tol = 1e-8);

/// Uniform line grid t_j = (j - n/2) h, j = 0..n-1.
struct LineGrid {
  double h = 0.1;
  int n = 1024;
  double t(int j) const { return (j - n / 2) * h; }
};

struct FullLineResult {
  Vector u;
  double interior_residual = 0.0;  ///< max residual over the middle half of the grid
};

/// lambda u(t) - int K(t-s) u(s) ds = f(t) by zero-padded discrete Fourier
/// division (padding factor 4). Samples of K and f live on the same grid.
FullLineResult solve_fullline_convolution(const LineGrid& grid, const Vector& k_samples, const Vector& f_samples,
                                          cplx lambda);

/// Same equation, residual by direct sum over the grid.
Vector fullline_residual(const LineGrid& grid, const Vector& k_samples, const Vector& f_samples, cplx lambda,
                         const Vector& u);

}  // namespace iew::singular
