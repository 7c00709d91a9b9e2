#pragma once

// Second-kind Fredholm equations u = mu K u + f on a Nystrom grid: degenerate
// kernels, the alternative with null-space diagnostics, selfadjoint spectral
// solves, stationary iterations and Galerkin projection.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "iew/grid_quad.hpp"

namespace iew::fredholm {

using quad::DiscreteOperator;
using quad::QuadRule;

/// Parameters of (lambda I - mu K) u = f. Most solvers fix lambda = 1.
struct SolveSpec {
  cplx mu = 1.0;
  cplx lambda = 1.0;
  Vector rhs;
};

struct SolveReport {
  Vector solution;
  double residual = 0.0;  ///< ||u - mu K u - f|| / ||f|| in the weighted norm
  bool solvable = true;
};

struct AlternativeReport {
  int null_dim = 0;
  int adjoint_null_dim = 0;
  Matrix null_basis;          ///< weighted-orthonormal columns spanning N(I - mu K)
  Matrix adjoint_null_basis;  ///< weighted-orthonormal columns spanning N(I - conj(mu) K*)
  bool solvable = true;
  /// Weighted projections (f, v_j) on the adjoint null basis.
  Vector adjoint_projections;
  /// Coefficients c_j of the returned solution on the null basis. The
  /// minimal-norm representative has all c_j = 0; any other choice is
  /// u + null_basis * c.
  Vector general_solution_offsets;
  RealVector singular_values;
};

struct DegenerateResult {
  Vector solution;
  Vector characteristic_values;  ///< 1 / eigenvalues of the M x M matrix (nonzero ones only)
  bool solvable = true;
  int null_dim = 0;
};

/// Kernel sum_m a_m(x) b_m(t). Inner products are evaluated with the rule.
DegenerateResult solve_degenerate(const std::vector<ComplexFunction>& a_funcs,
                                  const std::vector<ComplexFunction>& b_funcs, cplx mu, const ComplexFunction& f,
                                  const QuadRule& rule);

/// Fredholm alternative on the discrete level. Rank decisions use
/// singular values below tol * sigma_max of I - mu M.
std::pair<SolveReport, AlternativeReport> solve_second_kind(const DiscreteOperator& op, const SolveSpec& spec,
                                                            double tol = 1e-10);

struct EigenDecomposition {
  RealVector eigenvalues;         ///< descending
  Matrix eigenvectors;            ///< columns orthonormal in the weighted product
  RealVector weights;
  /// 1 / lambda_j; +inf where lambda_j is numerically zero.
  RealVector characteristic_values() const;
  /// Eigenvalues with |lambda_j| <= zero_tol * max|lambda| count as zero.
  double zero_tol = 1e-12;
};

/// Selfadjoint eigendecomposition through D^{1/2} M D^{-1/2}. Throws
/// ContractViolation when the operator is not selfadjoint and real.
EigenDecomposition eig_decompose(const DiscreteOperator& op);

/// u = f0 + sum_j mu_j f_j / (mu_j - lambda) u_j solving u = lambda K u + f.
/// f0 is the part of f in the numerical null space of K.
Vector solve_selfadjoint_spectral(const EigenDecomposition& decomp, const Vector& f, cplx lambda,
                                  double resonance_tol = 1e-10);

/// Power iteration with a two-dimensional Rayleigh-Ritz step, which also
/// resolves complex conjugate dominant pairs.
double spectral_radius(const Matrix& m, int iters = 200);
double spectral_radius(const DiscreteOperator& op, int iters = 200);

enum class IterationVariant { plain, resolvent, symmetrized, normal };

std::string to_string(IterationVariant v);
IterationVariant parse_variant(const std::string& name);

struct IterativeOptions {
  int max_iter = 1000;
  double tol = 1e-10;
  /// Spectral bounds 0 < m <= B <= M; estimated when absent.
  std::optional<std::pair<double, double>> bounds;
};

struct IterativeReport {
  Vector solution;
  int iterations = 0;
  std::vector<double> residual_history;  ///< relative weighted residuals
  double rho_estimate = 0.0;             ///< spectral radius of the iteration map
  IterationVariant variant = IterationVariant::plain;
  double m = 0.0;
  double M = 0.0;
  bool converged = false;
  bool diverged = false;
};

/// Stationary iterations for (lambda I - mu K) u = f, started from u = 0.
IterativeReport solve_iterative(const DiscreteOperator& op, const SolveSpec& spec, IterationVariant variant,
                                const IterativeOptions& options = {});

enum class BasisFamily { fourier, legendre };

struct ProjectionStep {
  int n = 0;
  Vector solution;
  double error_vs_finest = 0.0;  ///< weighted distance to the Nystrom solution
  bool singular = false;
};

struct ProjectionReport {
  std::vector<ProjectionStep> steps;
  Vector reference;
  bool tail_decreasing = false;  ///< errors strictly decrease over the last three n
};

/// Galerkin solutions of u = mu K u + f in the span of the first n basis
/// functions, orthonormalised on the grid.
ProjectionReport solve_projection(const DiscreteOperator& op, const SolveSpec& spec, BasisFamily family,
                                  const std::vector<int>& n_sequence);

/// First n basis functions sampled on an interval rule (columns).
Matrix sample_basis(const QuadRule& rule, BasisFamily family, int n);

}  // namespace iew::fredholm
