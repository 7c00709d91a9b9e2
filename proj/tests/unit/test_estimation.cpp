#include <doctest.h>

#include <cmath>

#include "iew/errors.hpp"
#include "iew/estimation.hpp"
#include "iew/linalg.hpp"

using namespace iew;
using namespace iew::estimation;

namespace {

const quad::QuadRule gauss64 = quad::build_interval_rule(quad::IntervalKind::gauss_legendre, 64, -1.0, 1.0);

EstimationProblem analytic(RealFunction f, RealFunction df, RealFunction d2f) {
  return {std::move(f), std::move(df), std::move(d2f)};
}

std::vector<double> chebyshev_points(int n) {
  std::vector<double> x;
  for (int j = 0; j < n; ++j) x.push_back(std::cos(M_PI * j / (n - 1)));
  return x;
}

}  // namespace

TEST_CASE("constant data") {
  const auto h = solve_exp_kernel(analytic([](double) { return 1.0; }, [](double) { return 0.0; },
                                           [](double) { return 0.0; }));
  for (double x : {-1.0, -0.3, 0.0, 0.8}) CHECK(h.regular(x) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(h.atom_left == doctest::Approx(0.5));
  CHECK(h.atom_right == doctest::Approx(0.5));
  CHECK(h.ordsing == 1);
  for (double x : chebyshev_points(17)) CHECK(std::abs(apply_R(h, x, gauss64) - 1.0) <= 1e-10);
}

TEST_CASE("hyperbolic cosine data") {
  const auto h = solve_exp_kernel(analytic([](double x) { return std::cosh(x); }, [](double x) { return std::sinh(x); },
                                           [](double x) { return std::cosh(x); }));
  for (double x : {-1.0, 0.0, 0.5}) CHECK(std::abs(h.regular(x)) < 1e-15);
  CHECK(h.atom_left == doctest::Approx(M_E / 2).epsilon(1e-14));
  CHECK(h.atom_right == doctest::Approx(M_E / 2).epsilon(1e-14));
  for (double x : chebyshev_points(17)) CHECK(std::abs(apply_R(h, x, gauss64) - std::cosh(x)) <= 1e-10);
}

TEST_CASE("zero data") {
  const auto h = solve_exp_kernel({[](double) { return 0.0; }, nullptr, nullptr});
  CHECK(h.atom_left == 0.0);
  CHECK(h.atom_right == 0.0);
  CHECK(h.ordsing == 0);
  CHECK(std::abs(h.regular(0.2)) < 1e-12);
  CHECK(std::abs(apply_R(h, 0.4, gauss64)) < 1e-12);
}

TEST_CASE("round trip with spectral derivatives") {
  const std::vector<RealFunction> fs = {
      [](double) { return 1.0; }, [](double x) { return x; }, [](double x) { return x * x; },
      [](double x) { return std::cosh(x); }, [](double x) { return std::sin(2.0 * x); }};
  for (const auto& f : fs) {
    const auto h = solve_exp_kernel({f, nullptr, nullptr});
    CHECK(h.ordsing == 1);
    double worst = 0.0;
    for (double x : chebyshev_points(33)) worst = std::max(worst, std::abs(apply_R(h, x, gauss64) - f(x)));
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("spectral derivatives") {
  auto [d1, d2] = chebyshev_derivatives([](double x) { return std::sin(2.0 * x); }, 0.3);
  CHECK(d1 == doctest::Approx(2.0 * std::cos(0.6)).epsilon(1e-11));
  CHECK(d2 == doctest::Approx(-4.0 * std::sin(0.6)).epsilon(1e-10));
  CHECK_THROWS_AS(solve_exp_kernel({[](double x) { return std::log(1.0 + x); }, nullptr, nullptr}), InputError);
}

TEST_CASE("atoms reflect with the data") {
  const RealFunction f = [](double x) { return std::exp(0.7 * x) + x * x * x; };
  const RealFunction g = [&](double x) { return f(-x); };
  const auto hf = solve_exp_kernel({f, nullptr, nullptr});
  const auto hg = solve_exp_kernel({g, nullptr, nullptr});
  CHECK(hf.atom_left == doctest::Approx(hg.atom_right).epsilon(1e-10));
  CHECK(hf.atom_right == doctest::Approx(hg.atom_left).epsilon(1e-10));
}

TEST_CASE("apply_R domain") {
  const auto h = solve_exp_kernel({[](double) { return 1.0; }, nullptr, nullptr});
  CHECK_THROWS_AS(apply_R(h, 1.0001, gauss64), DomainError);
  CHECK_THROWS_AS(apply_R(h, -2.0, gauss64), DomainError);
}

namespace {

// exact eigenvalues 2 / (1 + w^2) of exp(-|x-y|) on [-1, 1]: w tan w = 1 or w cot w = -1
std::vector<double> exact_eigenvalues(int count) {
  auto bisect = [](auto g, double lo, double hi) {
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (g(lo) < 0) == (g(mid) < 0) ? lo = mid : hi = mid;
    }
    return 0.5 * (lo + hi);
  };
  std::vector<double> lam;
  for (int k = 0; static_cast<int>(lam.size()) < count; ++k) {
    const double e = 1e-12;
    const double w1 = bisect([](double w) { return w * std::tan(w) - 1.0; }, k * M_PI + e, (k + 0.5) * M_PI - e);
    const double w2 = bisect([](double w) { return w / std::tan(w) + 1.0; }, (k + 0.5) * M_PI + e, (k + 1) * M_PI - e);
    lam.push_back(2.0 / (1.0 + w1 * w1));
    lam.push_back(2.0 / (1.0 + w2 * w2));
  }
  return lam;
}

double exact_slope(int lo, int hi) {
  const auto lam = exact_eigenvalues(hi + 2);
  RealVector js(hi - lo + 1), ls(hi - lo + 1);
  for (int j = lo; j <= hi; ++j) js[j - lo] = j, ls[j - lo] = lam[static_cast<std::size_t>(j - 1)];
  return linalg::loglog_slope(js, ls);
}

quad::DiscreteOperator exp_abs_op(int n) {
  return quad::assemble_nystrom(quad::Kernel::exp_abs(),
                                quad::build_interval_rule(quad::IntervalKind::gauss_legendre, n, -1, 1));
}

}  // namespace

TEST_CASE("eigenvalue decay exponent") {
  // the fitted slope approaches -2 only deep in the spectrum
  CHECK(exact_slope(5, 25) == doctest::Approx(-2.1698).epsilon(1e-4));
  CHECK(std::abs(exact_slope(20, 60) + 2.0) <= 0.1);
  const double e256 = decay_exponent(exp_abs_op(256), 5, 25);
  const double e512 = decay_exponent(exp_abs_op(512), 5, 25);
  CHECK(std::abs(e256 - exact_slope(5, 25)) <= 0.01);
  CHECK(std::abs(e512 - e256) <= 0.02);
  CHECK(std::abs(decay_exponent(exp_abs_op(512), 20, 60) + 2.0) <= 0.1);
}

TEST_CASE("rank-one kernel has no decay law") {
  const auto op = quad::assemble_nystrom(quad::Kernel::constant(1.0),
                                         quad::build_interval_rule(quad::IntervalKind::gauss_legendre, 128, -1, 1));
  CHECK_THROWS_AS(decay_exponent(op, 5, 25), RangeError);
}
