#pragma once

// Fixed points of nonlinear integral operators
//   A(u)(x) = mu int_D K(x, t, u(t)) dt + f(x)
// by contraction, monotone bracketing and parameter continuation. All norms
// are sup norms over the grid nodes.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "iew/grid_quad.hpp"

namespace iew::nonlinear {

using FixedPointMap = std::function<RealVector(const RealVector&)>;
using ParametricMap = std::function<RealVector(const RealVector&, double)>;
using UrysohnKernel = std::function<double(double x, double t, double u)>;

class UrysohnOperator {
 public:
  UrysohnOperator(UrysohnKernel kernel, double mu, RealFunction f, quad::QuadRule rule,
                  std::optional<double> lipschitz_q = std::nullopt);

  RealVector operator()(const RealVector& u) const;
  FixedPointMap as_map() const;

  const quad::QuadRule& rule() const { return rule_; }
  std::size_t size() const { return rule_.size(); }
  std::optional<double> lipschitz_q() const { return q_; }
  const RealVector& f_samples() const { return f_; }

 private:
  UrysohnKernel kernel_;
  double mu_;
  quad::QuadRule rule_;
  RealVector f_;
  std::optional<double> q_;
};

double sup_norm(const RealVector& u);

/// 1.1 times the largest of 32 sampled difference quotients of A around u0.
double estimate_lipschitz(const FixedPointMap& a, const RealVector& u0, std::uint64_t seed = 20240611);

struct ContractionOptions {
  int max_iter = 500;
  double tol = 1e-12;
  std::optional<double> q;  ///< overrides the sampled estimate
};

struct ContractionReport {
  RealVector solution;
  int iterations = 0;              ///< index of the first iterate that is a fixed point to tol
  std::vector<double> differences; ///< |u_{n+1} - u_n| for n = 0, 1, ...
  std::vector<double> bound;       ///< q^n / (1 - q) |u_1 - u_0|
  std::vector<RealVector> iterates;
  double q = 0.0;
  bool converged = false;
};

ContractionReport solve_contraction(const FixedPointMap& a, const RealVector& u0, const ContractionOptions& options = {});
ContractionReport solve_contraction(const UrysohnOperator& a, const RealVector& u0, ContractionOptions options = {});

struct Bracket {
  RealVector v;  ///< subsolution
  RealVector w;  ///< supersolution
};

/// Checks v <= w, A(v) >= v and A(w) <= w at the nodes.
Bracket make_bracket(const FixedPointMap& a, RealVector v, RealVector w);

struct MonotoneOptions {
  int max_iter = 500;
  double tol = 1e-12;
  int spot_checks = 8;
  std::uint64_t seed = 7;
};

struct MonotoneReport {
  RealVector solution;  ///< midpoint of the final bracket
  Bracket bracket;
  int iterations = 0;
  std::vector<double> gaps;
  std::vector<Bracket> history;
  bool converged = false;
};

/// v_n = A(v_{n-1}) increases, w_n = A(w_{n-1}) decreases. Monotonicity of A is
/// spot-checked on random ordered pairs inside the bracket.
MonotoneReport solve_monotone(const FixedPointMap& a, const Bracket& b, const MonotoneOptions& options = {});

enum class InnerMethod { contraction, monotone };

struct ContinuationOptions {
  InnerMethod inner = InnerMethod::contraction;
  ContractionOptions contraction;
  MonotoneOptions monotone;
  /// Bracket valid along the whole path (monotone inner method).
  std::optional<Bracket> bracket;
};

struct ContinuationReport {
  RealVector solution;
  std::vector<double> lambdas;
  std::vector<int> inner_iterations;
  double residual = 0.0;  ///< |u - A(u, 1)|
};

/// Solves u = A(u, k / steps) for k = 0..steps, warm-starting each solve.
ContinuationReport solve_continuation(const ParametricMap& a, const RealVector& u0, int steps,
                                      const ContinuationOptions& options = {});

}  // namespace iew::nonlinear
