#include "iew/nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "iew/errors.hpp"

namespace iew::nonlinear {

UrysohnOperator::UrysohnOperator(UrysohnKernel kernel, double mu, RealFunction f, quad::QuadRule rule,
                                 std::optional<double> lipschitz_q)
    : kernel_(std::move(kernel)), mu_(mu), rule_(std::move(rule)), q_(lipschitz_q) {
  if (!kernel_ || !f) throw ArgumentError("UrysohnOperator: kernel and f are required");
  if (rule_.kind() != quad::DomainKind::interval) throw ArgumentError("UrysohnOperator: interval rules only");
  f_.resize(rule_.size());
  for (Eigen::Index i = 0; i < f_.size(); ++i) f_[i] = f(rule_.nodes()[i]);
}

RealVector UrysohnOperator::operator()(const RealVector& u) const {
  const auto n = f_.size();
  if (u.size() != n) throw ArgumentError("UrysohnOperator: sample count mismatch");
  const RealVector& x = rule_.nodes();
  const RealVector& w = rule_.weights();
  RealVector out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) s += w[j] * kernel_(x[i], x[j], u[j]);
    if (!std::isfinite(s)) throw InputError("UrysohnOperator: kernel not finite at the sampled arguments");
    out[i] = mu_ * s + f_[i];
  }
  return out;
}

FixedPointMap UrysohnOperator::as_map() const {
  return [op = *this](const RealVector& u) { return op(u); };
}

double sup_norm(const RealVector& u) { return u.size() ? u.cwiseAbs().maxCoeff() : 0.0; }

double estimate_lipschitz(const FixedPointMap& a, const RealVector& u0, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const RealVector a0 = a(u0);
  const double scale = std::max({1.0, sup_norm(u0), sup_norm(a0)});
  const RealVector a1 = a(a0);
  const RealVector bases[2] = {u0, a0};
  double worst = 0.0;
  for (int k = 0; k < 32; ++k) {
    const RealVector& base = bases[k % 2];
    // half the directions are constant: integral operators average out
    // oscillating ones and would be underestimated
    RealVector d(u0.size());
    if ((k / 2) % 2) {
      d.setConstant(unif(rng) < 0.0 ? -1.0 : 1.0);
    } else {
      for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = unif(rng);
    }
    const double step = scale * std::pow(10.0, -1.0 - 3.0 * (k / 2) / 15.0);
    d *= step / std::max(sup_norm(d), 1e-300);
    const double quotient = sup_norm(a(base + d) - (k % 2 ? a1 : a0)) / sup_norm(d);
    worst = std::max(worst, quotient);
  }
  return 1.1 * worst;
}

ContractionReport solve_contraction(const FixedPointMap& a, const RealVector& u0, const ContractionOptions& options) {
  if (options.max_iter < 1) throw ArgumentError("solve_contraction: max_iter must be positive");
  ContractionReport rep;
  rep.q = options.q ? *options.q : estimate_lipschitz(a, u0);
  if (!(rep.q < 1.0)) throw NotContractionError("solve_contraction: Lipschitz estimate q >= 1");
  rep.iterates.push_back(u0);
  RealVector u = u0;
  int growing = 0;
  for (int n = 1; n <= options.max_iter; ++n) {
    RealVector next = a(u);
    const double diff = sup_norm(next - u);
    if (!rep.differences.empty() && diff > rep.differences.back()) {
      if (++growing >= 5) throw NotContractionError("solve_contraction: successive differences keep growing");
    } else {
      growing = 0;
    }
    rep.differences.push_back(diff);
    u = std::move(next);
    rep.iterates.push_back(u);
    if (diff <= options.tol) {
      rep.iterations = n - 1;
      rep.converged = true;
      break;
    }
    rep.iterations = n;
  }
  const double d0 = rep.differences.front();
  for (std::size_t n = 0; n < rep.iterates.size(); ++n)
    rep.bound.push_back(std::pow(rep.q, static_cast<double>(n)) / (1.0 - rep.q) * d0);
  rep.solution = u;
  return rep;
}

ContractionReport solve_contraction(const UrysohnOperator& a, const RealVector& u0, ContractionOptions options) {
  if (!options.q && a.lipschitz_q()) options.q = a.lipschitz_q();
  return solve_contraction(a.as_map(), u0, options);
}

namespace {

double order_tol(const RealVector& a, const RealVector& b) {
  return 1e-12 * std::max({1.0, sup_norm(a), sup_norm(b)});
}

bool leq(const RealVector& a, const RealVector& b, double tol) { return ((a - b).array() <= tol).all(); }

}  // namespace

Bracket make_bracket(const FixedPointMap& a, RealVector v, RealVector w) {
  if (v.size() != w.size()) throw ArgumentError("make_bracket: v and w differ in length");
  const double tol = order_tol(v, w);
  if (!leq(v, w, tol)) throw ContractViolation("make_bracket: v <= w fails");
  if (!leq(v, a(v), tol)) throw ContractViolation("make_bracket: v is not a subsolution");
  if (!leq(a(w), w, tol)) throw ContractViolation("make_bracket: w is not a supersolution");
  return {std::move(v), std::move(w)};
}

MonotoneReport solve_monotone(const FixedPointMap& a, const Bracket& b, const MonotoneOptions& options) {
  const Bracket start = make_bracket(a, b.v, b.w);
  const double tol = order_tol(b.v, b.w);

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int k = 0; k < options.spot_checks; ++k) {
    RealVector lo(b.v.size()), hi(b.v.size());
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
      double s = unif(rng), t = unif(rng);
      if (s > t) std::swap(s, t);
      lo[i] = b.v[i] + s * (b.w[i] - b.v[i]);
      hi[i] = b.v[i] + t * (b.w[i] - b.v[i]);
    }
    if (!leq(a(lo), a(hi), tol)) throw ContractViolation("solve_monotone: operator is not monotone on the bracket");
  }

  MonotoneReport rep;
  rep.bracket = start;
  rep.history.push_back(start);
  rep.gaps.push_back(sup_norm(start.w - start.v));
  if (rep.gaps.back() <= options.tol) {
    rep.converged = true;
    rep.solution = 0.5 * (start.v + start.w);
    return rep;
  }
  for (int n = 1; n <= options.max_iter; ++n) {
    Bracket next{a(rep.bracket.v), a(rep.bracket.w)};
    if (!leq(rep.bracket.v, next.v, tol) || !leq(next.w, rep.bracket.w, tol) || !leq(next.v, next.w, tol))
      throw ContractViolation("solve_monotone: iterates lost their ordering");
    rep.bracket = std::move(next);
    rep.history.push_back(rep.bracket);
    rep.iterations = n;
    rep.gaps.push_back(sup_norm(rep.bracket.w - rep.bracket.v));
    if (rep.gaps.back() <= options.tol) {
      rep.converged = true;
      break;
    }
  }
  rep.solution = 0.5 * (rep.bracket.v + rep.bracket.w);
  return rep;
}

ContinuationReport solve_continuation(const ParametricMap& a, const RealVector& u0, int steps,
                                      const ContinuationOptions& options) {
  if (steps < 1) throw ArgumentError("solve_continuation: steps must be positive");
  if (options.inner == InnerMethod::monotone && !options.bracket)
    throw ArgumentError("solve_continuation: monotone inner method needs a bracket");
  ContinuationReport rep;
  RealVector u = u0;
  for (int k = 0; k <= steps; ++k) {
    const double lambda = static_cast<double>(k) / steps;
    const FixedPointMap ak = [&a, lambda](const RealVector& x) { return a(x, lambda); };
    try {
      if (options.inner == InnerMethod::contraction) {
        const ContractionReport r = solve_contraction(ak, u, options.contraction);
        if (!r.converged) throw Error("inner contraction did not converge");
        u = r.solution;
        rep.inner_iterations.push_back(r.iterations);
      } else {
        const MonotoneReport r = solve_monotone(ak, *options.bracket, options.monotone);
        if (!r.converged) throw Error("inner monotone iteration did not converge");
        u = r.solution;
        rep.inner_iterations.push_back(r.iterations);
      }
    } catch (const Error& e) {
      throw PathFailureError(std::string("continuation failed: ") + e.what(), lambda);
    }
    rep.lambdas.push_back(lambda);
  }
  rep.solution = u;
  rep.residual = sup_norm(u - a(u, 1.0));
  return rep;
}

}  // namespace iew::nonlinear
