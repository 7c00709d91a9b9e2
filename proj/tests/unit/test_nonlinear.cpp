#include <doctest.h>

#include <cmath>

#include "iew/errors.hpp"
#include "iew/fredholm2.hpp"
#include "iew/nonlinear.hpp"

using namespace iew;
using namespace iew::nonlinear;

namespace {

const quad::QuadRule unit16 = quad::build_interval_rule(quad::IntervalKind::gauss_legendre, 16, 0.0, 1.0);

double weighted_sum(const RealVector& v) { return unit16.weights().dot(v); }

RealVector constant(double c) { return RealVector::Constant(static_cast<Eigen::Index>(unit16.size()), c); }

}  // namespace

TEST_CASE("kernel independent of u converges in one step") {
  const UrysohnOperator a([](double x, double t, double) { return x * t; }, 1.0, [](double x) { return x; }, unit16);
  const auto rep = solve_contraction(a, constant(0.0));
  CHECK(rep.converged);
  CHECK(rep.iterations == 1);
  for (Eigen::Index i = 0; i < rep.solution.size(); ++i)
    CHECK(rep.solution[i] == doctest::Approx(1.5 * unit16.nodes()[i]).epsilon(1e-13));
}

TEST_CASE("sin(u)/2 contraction obeys the a priori bound") {
  const UrysohnOperator a([](double, double, double u) { return 0.5 * std::sin(u); }, 1.0, [](double) { return 1.0; },
                          unit16);
  const double q = estimate_lipschitz(a.as_map(), constant(0.0));
  CHECK(q >= 0.5);
  CHECK(q <= 0.55 + 1e-12);
  ContractionOptions opt;
  opt.q = 0.5;
  const auto rep = solve_contraction(a, constant(0.0), opt);
  REQUIRE(rep.converged);
  const RealVector& star = rep.solution;
  for (std::size_t n = 0; n < rep.iterates.size(); ++n)
    CHECK(sup_norm(rep.iterates[n] - star) <= rep.bound[n] + 1e-12);
  CHECK(sup_norm(star - a(star)) <= 10.0 * opt.tol);

  const auto est = solve_contraction(a, constant(0.0));
  for (std::size_t n = 0; n < est.iterates.size(); ++n)
    CHECK(sup_norm(est.iterates[n] - est.solution) <= est.bound[n] + 1e-12);
}

TEST_CASE("linear kernel agrees with the linear iterative solver") {
  const UrysohnOperator a([](double, double, double u) { return 0.5 * u; }, 1.0, [](double) { return 1.0; }, unit16);
  const auto rep = solve_contraction(a, constant(0.0));
  REQUIRE(rep.converged);
  CHECK(sup_norm(rep.solution - constant(2.0)) <= 1e-11);

  const auto op = quad::assemble_nystrom(quad::Kernel::constant(0.5), unit16);
  fredholm::SolveSpec spec;
  spec.rhs = Vector::Ones(static_cast<Eigen::Index>(unit16.size()));
  const auto lin = fredholm::solve_iterative(op, spec, fredholm::IterationVariant::plain);
  REQUIRE(lin.converged);
  CHECK(sup_norm(rep.solution - lin.solution.real()) <= 1e-9);
}

TEST_CASE("expanding map is rejected") {
  const UrysohnOperator a([](double, double, double u) { return 2.0 * u; }, 1.0, [](double) { return 1.0; }, unit16);
  CHECK_THROWS_AS(solve_contraction(a, constant(0.0)), NotContractionError);
  ContractionOptions opt;
  opt.q = 0.9;  // a wrong analytic constant: the observed growth still stops it
  CHECK_THROWS_AS(solve_contraction(a, constant(0.0), opt), NotContractionError);
}

TEST_CASE("Hammerstein operator against a composed Nystrom map") {
  const auto k = [](double x, double t) { return 0.4 * std::exp(-std::abs(x - t)); };
  const auto phi = [](double u) { return std::cos(u) + 0.3 * u; };
  const UrysohnOperator a([&](double x, double t, double u) { return k(x, t) * phi(u); }, 1.0,
                          [](double x) { return x * x; }, unit16);
  const auto rep = solve_contraction(a, constant(0.0));
  REQUIRE(rep.converged);

  const Eigen::Index n = static_cast<Eigen::Index>(unit16.size());
  Eigen::MatrixXd m(n, n);
  RealVector f(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    f[i] = unit16.nodes()[i] * unit16.nodes()[i];
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = k(unit16.nodes()[i], unit16.nodes()[j]) * unit16.weights()[j];
  }
  RealVector u = RealVector::Zero(n);
  for (int it = 0; it < 400; ++it) u = f + m * u.unaryExpr(phi);
  CHECK(sup_norm(rep.solution - u) <= 1e-10);
}

TEST_CASE("monotone bracketing") {
  const FixedPointMap a = [](const RealVector& u) { return constant(0.25 * (weighted_sum(u) + 1.0)); };
  const auto rep = solve_monotone(a, {constant(0.0), constant(1.0)});
  REQUIRE(rep.converged);
  CHECK(sup_norm(rep.solution - constant(1.0 / 3.0)) <= 1e-12);
  CHECK(sup_norm(rep.solution - a(rep.solution)) <= 1e-11);
  for (std::size_t n = 1; n < rep.history.size(); ++n) {
    CHECK(((rep.history[n].v - rep.history[n - 1].v).array() >= -1e-15).all());
    CHECK(((rep.history[n].w - rep.history[n - 1].w).array() <= 1e-15).all());
    CHECK(((rep.history[n].w - rep.history[n].v).array() >= -1e-15).all());
  }

  const FixedPointMap b = [](const RealVector& u) { return constant(0.5 * weighted_sum(u) + 0.25); };
  CHECK(sup_norm(solve_monotone(b, {constant(0.0), constant(1.0)}).solution - constant(0.5)) <= 1e-12);
}

TEST_CASE("exact bracket returns immediately") {
  const FixedPointMap a = [](const RealVector& u) { return constant(0.25 * (weighted_sum(u) + 1.0)); };
  const auto rep = solve_monotone(a, {constant(1.0 / 3.0), constant(1.0 / 3.0)});
  CHECK(rep.converged);
  CHECK(rep.iterations == 0);
}

TEST_CASE("invalid brackets and non-monotone maps") {
  const FixedPointMap a = [](const RealVector& u) { return constant(0.25 * (weighted_sum(u) + 1.0)); };
  CHECK_THROWS_AS(make_bracket(a, constant(1.0), constant(0.0)), ContractViolation);
  CHECK_THROWS_AS(make_bracket(a, constant(0.5), constant(1.0)), ContractViolation);
  const FixedPointMap dec = [](const RealVector& u) { return constant(0.5 - 0.5 * weighted_sum(u)); };
  CHECK_THROWS_AS(solve_monotone(dec, {constant(0.0), constant(1.0)}), ContractViolation);
}

TEST_CASE("continuation") {
  const ParametricMap a = [](const RealVector& u, double lambda) {
    return constant(lambda * 0.5 * weighted_sum(u.array().sin().matrix()) + 1.0);
  };
  const auto rep = solve_continuation(a, constant(0.0), 4);
  CHECK(rep.lambdas.size() == 5);
  CHECK(rep.residual <= 1e-10);

  const auto one = solve_continuation(a, constant(0.0), 1);
  const FixedPointMap a1 = [&](const RealVector& u) { return a(u, 1.0); };
  const auto direct = solve_contraction(a1, constant(0.0));
  CHECK(sup_norm(one.solution - direct.solution) <= 1e-11);
  CHECK(sup_norm(rep.solution - direct.solution) <= 1e-11);

  const ParametricMap flat = [&](const RealVector& u, double) { return a(u, 1.0); };
  CHECK(sup_norm(solve_continuation(flat, constant(0.0), 3).solution - direct.solution) <= 1e-11);
}

TEST_CASE("continuation with the monotone inner method") {
  const ParametricMap a = [](const RealVector& u, double lambda) {
    return constant(lambda * 0.5 * weighted_sum(u) + 0.25);
  };
  ContinuationOptions opt;
  opt.inner = InnerMethod::monotone;
  opt.bracket = Bracket{constant(0.0), constant(1.0)};
  const auto rep = solve_continuation(a, constant(0.0), 4, opt);
  CHECK(sup_norm(rep.solution - constant(0.5)) <= 1e-11);
  CHECK_THROWS_AS(solve_continuation(a, constant(0.0), 4, {InnerMethod::monotone, {}, {}, std::nullopt}), ArgumentError);
}

TEST_CASE("continuation reports the failing parameter") {
  const ParametricMap a = [](const RealVector& u, double lambda) {
    return constant(3.0 * lambda * weighted_sum(u) + 1.0);
  };
  try {
    solve_continuation(a, constant(0.0), 4);
    FAIL("expected PathFailureError");
  } catch (const PathFailureError& e) {
    CHECK(e.lambda() == doctest::Approx(0.5));
  }
}
