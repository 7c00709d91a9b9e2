#pragma once

// First-kind equations K u = f: s-values, best low-rank approximation and
// regularised solutions from noisy data.

#include <cstdint>
#include <optional>
#include <string>

#include "iew/grid_quad.hpp"

namespace iew::illposed {

using quad::DiscreteOperator;

/// A u = sum_j s_j (u, u_j) v_j in the weighted inner product.
struct SValueDecomposition {
  RealVector s;   ///< non-increasing
  Matrix left;    ///< v_j
  Matrix right;   ///< u_j
  RealVector weights;
  int rank = 0;   ///< number of s_j above 1e-12 s_1

  Vector apply(const Vector& u) const;
  /// Nystrom matrix of the truncated sum over the first j terms.
  Matrix truncated(int j) const;
};

SValueDecomposition svalue_decompose(const DiscreteOperator& op);

/// s_{j+1}: the distance from A to operators of rank at most j.
double best_rank_error(const SValueDecomposition& d, int j);

/// Operator 2-norm of a Nystrom matrix in the weighted inner product.
double weighted_operator_norm(const Matrix& m, const RealVector& weights);

struct NoisyData {
  Vector f_delta;
  double delta = 0.0;
};

/// Pseudo-random direction with weighted norm exactly delta.
Vector make_noise(const RealVector& weights, double delta, std::uint64_t seed);

enum class Method { tsvd, tikhonov };
std::string to_string(Method m);
Method parse_method(const std::string& name);

struct FirstKindOptions {
  /// Keep exactly this many terms (tsvd); required for exact data.
  std::optional<int> truncation;
  /// tsvd threshold tau = factor * sqrt(delta) * s_1.
  double threshold_factor = 1.0;
  /// tsvd: pick the smallest truncation meeting the discrepancy target instead.
  bool tsvd_discrepancy = false;
  double discrepancy_target = 1.2;  ///< multiple of delta
  double discrepancy_tol = 0.05;    ///< relative tolerance of the bisection
};

struct RegularizedSolution {
  Vector u_delta;
  Method method = Method::tsvd;
  double parameter = 0.0;     ///< truncation level or alpha
  double discrepancy = 0.0;   ///< ||K u_delta - f_delta||
  bool noise_dominates = false;
  bool discrepancy_principle = false;  ///< parameter chosen by the discrepancy principle
  bool discrepancy_met = false;        ///< discrepancy <= 1.5 delta
};

RegularizedSolution solve_first_kind(const DiscreteOperator& op, const NoisyData& data, Method method,
                                     const FirstKindOptions& options = {});
RegularizedSolution solve_first_kind(const SValueDecomposition& d, const NoisyData& data, Method method,
                                     const FirstKindOptions& options = {});

}  // namespace iew::illposed
