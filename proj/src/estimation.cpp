#include "iew/estimation.hpp"

#include <cmath>
#include <memory>

#include "iew/errors.hpp"
#include "iew/fredholm2.hpp"
#include "iew/linalg.hpp"

namespace iew::estimation {

namespace {

constexpr int cheb_n = 64;

// Chebyshev-Lobatto differentiation data for one f.
struct ChebData {
  RealVector x, f, d1, d2;
};

ChebData chebyshev(const RealFunction& f) {
  const int n = cheb_n - 1;
  ChebData c;
  c.x.resize(cheb_n);
  c.f.resize(cheb_n);
  for (int j = 0; j <= n; ++j) {
    c.x[j] = std::cos(pi * j / n);
    c.f[j] = f(c.x[j]);
  }
  RealMatrix d(cheb_n, cheb_n);
  auto weight = [&](int j) { return (j == 0 || j == n ? 2.0 : 1.0) * (j % 2 ? -1.0 : 1.0); };
  for (int i = 0; i <= n; ++i) {
    double diag = 0.0;
    for (int j = 0; j <= n; ++j) {
      if (i == j) continue;
      d(i, j) = weight(i) / weight(j) / (c.x[i] - c.x[j]);
      diag -= d(i, j);
    }
    d(i, i) = diag;  // negative sum trick
  }
  c.d1 = d * c.f;
  c.d2 = d * c.d1;
  return c;
}

// Barycentric interpolation on the Chebyshev-Lobatto points.
double interpolate(const RealVector& xs, const RealVector& v, double x) {
  const int n = static_cast<int>(xs.size()) - 1;
  double num = 0.0, den = 0.0;
  for (int j = 0; j <= n; ++j) {
    const double dx = x - xs[j];
    if (dx == 0.0) return v[j];
    const double w = (j == 0 || j == n ? 0.5 : 1.0) * (j % 2 ? -1.0 : 1.0) / dx;
    num += w * v[j];
    den += w;
  }
  return num / den;
}

void require_finite(double v) {
  if (!std::isfinite(v)) throw InputError("estimation: non-finite derivative sample");
}

}  // namespace

std::pair<double, double> chebyshev_derivatives(const RealFunction& f, double x) {
  const ChebData c = chebyshev(f);
  return {interpolate(c.x, c.d1, x), interpolate(c.x, c.d2, x)};
}

RealVector DistributionalSolution::sample_regular(const quad::QuadRule& rule) const {
  RealVector out(rule.size());
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = regular(rule.nodes()[i]);
  return out;
}

DistributionalSolution solve_exp_kernel(const EstimationProblem& p) {
  if (!p.f) throw ArgumentError("solve_exp_kernel: f is required");
  DistributionalSolution h;
  RealFunction df = p.df, d2f = p.d2f;
  if (!df || !d2f) {
    auto c = std::make_shared<const ChebData>(chebyshev(p.f));
    for (Eigen::Index j = 0; j < c->x.size(); ++j) {
      require_finite(c->d1[j]);
      require_finite(c->d2[j]);
    }
    if (!df) df = [c](double x) { return interpolate(c->x, c->d1, x); };
    if (!d2f) d2f = [c](double x) { return interpolate(c->x, c->d2, x); };
  }
  for (double x : {-1.0, 1.0}) {
    require_finite(p.f(x));
    require_finite(df(x));
    require_finite(d2f(x));
  }
  h.regular = [f = p.f, d2f](double x) { return 0.5 * (f(x) - d2f(x)); };
  h.atom_right = 0.5 * (df(1.0) + p.f(1.0));
  h.atom_left = 0.5 * (p.f(-1.0) - df(-1.0));
  h.ordsing = (h.atom_right != 0.0 || h.atom_left != 0.0) ? 1 : 0;
  return h;
}

double apply_R(const DistributionalSolution& h, double x, const quad::QuadRule& rule) {
  if (!(x >= -1.0 && x <= 1.0)) throw DomainError("apply_R: x outside [-1, 1]");
  RealVector gx, gw;
  quad::gauss_legendre(static_cast<int>(std::max<std::size_t>(rule.size(), 2)), gx, gw);
  double sum = 0.0;
  if (h.regular) {
    auto piece = [&](double a, double b) {
      if (b <= a) return 0.0;
      double s = 0.0;
      for (Eigen::Index i = 0; i < gx.size(); ++i) {
        const double y = 0.5 * (a + b) + 0.5 * (b - a) * gx[i];
        s += gw[i] * std::exp(-std::abs(x - y)) * h.regular(y);
      }
      return 0.5 * (b - a) * s;
    };
    sum = piece(-1.0, x) + piece(x, 1.0);
  }
  return sum + h.atom_right * std::exp(-std::abs(x - 1.0)) + h.atom_left * std::exp(-std::abs(x + 1.0));
}

double decay_exponent(const quad::DiscreteOperator& op, int j_lo, int j_hi) {
  if (j_lo < 1 || j_hi <= j_lo) throw ArgumentError("decay_exponent: need 1 <= j_lo < j_hi");
  if (static_cast<std::size_t>(j_hi) > op.size()) throw ArgumentError("decay_exponent: range exceeds node count");
  const fredholm::EigenDecomposition d = fredholm::eig_decompose(op);
  const double top = d.eigenvalues[0];
  const int count = j_hi - j_lo + 1;
  RealVector js(count), ls(count);
  for (int k = 0; k < count; ++k) {
    const double l = d.eigenvalues[j_lo - 1 + k];
    if (!(top > 0.0) || l <= 1e-12 * top) throw RangeError("decay_exponent: non-positive eigenvalue in range");
    js[k] = j_lo + k;
    ls[k] = l;
  }
  return linalg::loglog_slope(js, ls);
}

}  // namespace iew::estimation
