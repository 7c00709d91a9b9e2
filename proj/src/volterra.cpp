#include "iew/volterra.hpp"

#include <algorithm>
#include <cmath>

#include "iew/errors.hpp"

namespace iew::volterra {

namespace {

void validate(const VolterraProblem& p) {
  if (p.n < 8) throw ArgumentError("volterra: need at least 8 trapezoid nodes");
  if (!(p.a < p.b)) throw ArgumentError("volterra: need a < b");
  if (!p.f) throw ArgumentError("volterra: missing right-hand side");
}

// Lower triangle of K(x_i, x_j) times the triangle trapezoid weights.
Matrix triangle(const VolterraProblem& p, const RealVector& x) {
  const auto n = x.size();
  const double h = (p.b - p.a) / static_cast<double>(n - 1);
  Matrix v = Matrix::Zero(n, n);
  for (Eigen::Index i = 1; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const cplx k = p.kernel(x[i], x[j]);
      if (!std::isfinite(k.real()) || !std::isfinite(k.imag()))
        throw InputError("volterra: kernel is not finite on the triangle");
      v(i, j) = k * ((j == 0 || j == i) ? 0.5 * h : h);
    }
  }
  return v;
}

Vector rhs(const VolterraProblem& p, const RealVector& x) {
  Vector f(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) f[i] = p.f(x[i]);
  return f;
}

}  // namespace

RealVector nodes(const VolterraProblem& p) {
  validate(p);
  return RealVector::LinSpaced(p.n, p.a, p.b);
}

VolterraSolution solve_direct(const VolterraProblem& p) {
  validate(p);
  VolterraProblem q = p;
  for (int attempt = 0; attempt <= 3; ++attempt) {
    const RealVector x = RealVector::LinSpaced(q.n, q.a, q.b);
    const Matrix v = triangle(q, x);
    const Vector f = rhs(q, x);
    Vector u(q.n);
    bool singular = false;
    for (Eigen::Index i = 0; i < q.n && !singular; ++i) {
      cplx acc = f[i];
      for (Eigen::Index j = 0; j < i; ++j) acc += q.mu * v(i, j) * u[j];
      const cplx diag = 1.0 - q.mu * v(i, i);
      if (std::abs(diag) <= 1e-14) {
        singular = true;
        break;
      }
      u[i] = acc / diag;
    }
    if (!singular) return {x, u, q.n};
    q.n = 2 * (q.n - 1) + 1;
  }
  throw SingularSystemError("volterra: vanishing diagonal persists after grid refinement", INFINITY);
}

fredholm::IterativeReport solve_picard(const VolterraProblem& p, int max_iter, double tol) {
  validate(p);
  if (max_iter < 1) throw ArgumentError("volterra: max_iter must be positive");
  const RealVector x = nodes(p);
  const Matrix v = p.mu * triangle(p, x);
  const Vector f = rhs(p, x);
  fredholm::IterativeReport rep;
  rep.solution = f;
  for (int it = 1; it <= max_iter; ++it) {
    Vector next = v * rep.solution + f;
    const double diff = (next - rep.solution).cwiseAbs().maxCoeff();
    rep.solution = std::move(next);
    rep.iterations = it;
    rep.residual_history.push_back(diff);
    if (!std::isfinite(diff)) {
      rep.diverged = true;
      return rep;
    }
    if (diff <= tol * std::max(1.0, rep.solution.cwiseAbs().maxCoeff())) {
      rep.converged = true;
      return rep;
    }
  }
  return rep;
}

quad::DiscreteOperator nystrom_matrix(const VolterraProblem& p) {
  validate(p);
  const RealVector x = nodes(p);
  quad::QuadRule rule = quad::build_interval_rule(quad::IntervalKind::trapezoid, p.n, p.a, p.b);
  return quad::DiscreteOperator(std::move(rule), triangle(p, x), false);
}

}  // namespace iew::volterra
