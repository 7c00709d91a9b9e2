#include "iew/illposed.hpp"

#include <cmath>
#include <random>

#include "iew/errors.hpp"
#include "iew/linalg.hpp"

namespace iew::illposed {

namespace {

double wnorm(const Vector& u, const RealVector& w) { return std::sqrt((w.array() * u.array().abs2()).sum()); }

// (f, v_j) for all j.
Vector coefficients(const Matrix& basis, const Vector& f, const RealVector& w) {
  return basis.adjoint() * (w.cast<cplx>().asDiagonal() * f);
}

}  // namespace

Vector SValueDecomposition::apply(const Vector& u) const {
  const Vector c = coefficients(right, u, weights);
  return left * (s.cast<cplx>().asDiagonal() * c);
}

Matrix SValueDecomposition::truncated(int j) const {
  if (j < 0) throw ArgumentError("truncated: j must be non-negative");
  j = std::min<int>(j, static_cast<int>(s.size()));
  // u -> sum_{i<j} s_i v_i (u, u_i): M = V_j S_j U_j^H W.
  return left.leftCols(j) * s.head(j).cast<cplx>().asDiagonal() * right.leftCols(j).adjoint() *
         weights.cast<cplx>().asDiagonal();
}

SValueDecomposition svalue_decompose(const DiscreteOperator& op) {
  const linalg::WeightedSvd svd = linalg::weighted_svd(op.matrix(), op.weights());
  SValueDecomposition d;
  d.s = svd.s;
  d.left = svd.left;
  d.right = svd.right;
  d.weights = op.weights();
  d.rank = 0;
  if (d.s.size() && d.s[0] > 0.0)
    for (Eigen::Index i = 0; i < d.s.size(); ++i)
      if (d.s[i] > 1e-12 * d.s[0]) ++d.rank;
  return d;
}

double best_rank_error(const SValueDecomposition& d, int j) {
  if (j < 0) throw ArgumentError("best_rank_error: j must be non-negative");
  if (j >= d.rank) return 0.0;
  return d.s[j];
}

double weighted_operator_norm(const Matrix& m, const RealVector& weights) {
  const RealVector sw = weights.cwiseSqrt();
  const Matrix s = sw.asDiagonal() * m * sw.cwiseInverse().asDiagonal();
  return Eigen::JacobiSVD<Matrix>(s).singularValues()[0];
}

Vector make_noise(const RealVector& weights, double delta, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector e(weights.size());
  for (Eigen::Index i = 0; i < e.size(); ++i) e[i] = normal(rng);
  const double n = wnorm(e, weights);
  return n > 0.0 ? Vector(e * (delta / n)) : e;
}

std::string to_string(Method m) { return m == Method::tsvd ? "tsvd" : "tikhonov"; }

Method parse_method(const std::string& name) {
  if (name == "tsvd") return Method::tsvd;
  if (name == "tikhonov") return Method::tikhonov;
  throw ArgumentError("unknown regularization method '" + name + "'");
}

RegularizedSolution solve_first_kind(const DiscreteOperator& op, const NoisyData& data, Method method,
                                     const FirstKindOptions& options) {
  return solve_first_kind(svalue_decompose(op), data, method, options);
}

RegularizedSolution solve_first_kind(const SValueDecomposition& d, const NoisyData& data, Method method,
                                     const FirstKindOptions& options) {
  const auto n = d.s.size();
  if (data.f_delta.size() != n) throw ArgumentError("solve_first_kind: data length does not match operator");
  if (data.delta < 0.0) throw ArgumentError("solve_first_kind: delta must be non-negative");
  const RealVector& w = d.weights;
  const Vector& f = data.f_delta;
  const double fnorm = wnorm(f, w);
  const Vector fj = coefficients(d.left, f, w);

  RegularizedSolution out;
  out.method = method;
  out.u_delta = Vector::Zero(n);
  const double target = options.discrepancy_target * data.delta;

  auto finish = [&] {
    out.discrepancy = wnorm(d.apply(out.u_delta) - f, w);
    out.discrepancy_met = out.discrepancy <= 1.5 * data.delta;
    return out;
  };

  if (method == Method::tsvd) {
    if (data.delta > 0.0 && data.delta >= fnorm) {
      out.noise_dominates = true;
      return finish();
    }
    int keep;
    if (options.truncation) {
      keep = std::clamp(*options.truncation, 0, d.rank);
    } else if (data.delta == 0.0) {
      throw ArgumentError("solve_first_kind: exact data needs an explicit truncation");
    } else if (options.tsvd_discrepancy) {
      // Residual after keeping k terms is the norm of the dropped coefficients.
      keep = d.rank;
      double tail = 0.0;
      for (Eigen::Index j = d.rank; j < n; ++j) tail += std::norm(fj[j]);
      for (int k = d.rank; k >= 0; --k) {
        if (std::sqrt(tail) > target) break;
        keep = k;
        if (k > 0) tail += std::norm(fj[k - 1]);
      }
      out.discrepancy_principle = true;
    } else {
      const double tau = options.threshold_factor * std::sqrt(data.delta) * (n ? d.s[0] : 0.0);
      keep = 0;
      while (keep < d.rank && d.s[keep] > tau) ++keep;
    }
    for (int j = 0; j < keep; ++j) out.u_delta += (fj[j] / d.s[j]) * d.right.col(j);
    out.parameter = keep;
    return finish();
  }

  // Tikhonov: u = sum s_j / (s_j^2 + alpha) f_j u_j, alpha from the discrepancy principle.
  if (!(data.delta > 0.0)) throw ArgumentError("solve_first_kind: tikhonov needs delta > 0");
  if (fnorm <= target) {
    out.noise_dominates = true;
    return finish();
  }
  const RealVector s2 = d.s.array().square();
  auto residual = [&](double alpha) {
    double r = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) r += std::norm(alpha / (s2[j] + alpha) * fj[j]);
    return std::sqrt(r);
  };
  const double scale = std::max(s2[0], 1e-300);
  double lo = std::log(1e-18 * scale), hi = std::log(1e4 * scale);
  double alpha = std::exp(lo);
  if (residual(alpha) >= target) {
    // Even the least regularisation overshoots the target.
    out.discrepancy_principle = false;
  } else {
    for (int it = 0; it < 300; ++it) {
      const double mid = 0.5 * (lo + hi);
      alpha = std::exp(mid);
      const double r = residual(alpha);
      if (std::abs(r - target) <= options.discrepancy_tol * target) break;
      (r < target ? lo : hi) = mid;
    }
    out.discrepancy_principle = true;
  }
  for (Eigen::Index j = 0; j < n; ++j) out.u_delta += (d.s[j] / (s2[j] + alpha) * fj[j]) * d.right.col(j);
  out.parameter = alpha;
  return finish();
}

}  // namespace iew::illposed
