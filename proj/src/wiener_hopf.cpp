#include "iew/wiener_hopf.hpp"

#include <cmath>
#include <unsupported/Eigen/FFT>

#include "iew/errors.hpp"
#include "iew/grid_quad.hpp"

namespace iew::singular {

namespace {

int signed_mode(int k, int m) { return k < m / 2 ? k : k - m; }

// Nodes avoid theta = 0, where xi is infinite.
double theta(int j, int m) { return 2.0 * pi * (j + 0.5) / m; }
double xi_of(double th, double sigma) { return sigma / std::tan(0.5 * th); }
cplx w_of(double xi, double sigma) { return (I * xi - sigma) / (I * xi + sigma); }

// Coefficients c_n with s_j = sum_n c_n exp(i n theta_j), in FFT order.
Vector shifted_modes(const Vector& s) {
  const int m = static_cast<int>(s.size());
  Eigen::FFT<double> fft;
  std::vector<cplx> in(s.data(), s.data() + m), out;
  fft.fwd(out, in);
  Vector c(m);
  for (int k = 0; k < m; ++k) c[k] = out[k] * std::polar(1.0 / m, -pi * signed_mode(k, m) / m);
  return c;
}

Vector shifted_samples(const Vector& c) {
  const int m = static_cast<int>(c.size());
  std::vector<cplx> in(m), out;
  for (int k = 0; k < m; ++k) in[k] = c[k] * std::polar(1.0, pi * signed_mode(k, m) / m);
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  fft.inv(out, in);
  return Eigen::Map<Vector>(out.data(), m);
}

Vector keep_nonnegative(Vector c) {
  const auto m = c.size();
  for (Eigen::Index k = m / 2; k < m; ++k) c[k] = 0.0;
  return c;
}

Vector symbol_samples(const WienerHopfProblem& p, int m) {
  Vector s(m);
  for (int j = 0; j < m; ++j) s[j] = 1.0 - kernel_symbol(p, xi_of(theta(j, m), p.sigma));
  return s;
}

// Composite Gauss-Legendre on [a, b] with panels no wider than width.
template <class F>
cplx integrate(F&& f, double a, double b, double width, int order = 16) {
  if (!(b > a)) return 0.0;
  static thread_local RealVector x, w;
  if (x.size() != order) quad::gauss_legendre(order, x, w);
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / width)));
  const double h = (b - a) / panels;
  cplx sum = 0.0;
  for (int q = 0; q < panels; ++q) {
    const double lo = a + q * h;
    for (int i = 0; i < order; ++i) sum += 0.5 * h * w[i] * f(lo + 0.5 * h * (x[i] + 1.0));
  }
  return sum;
}

// exp(-sigma t) L_n(2 sigma t) for n = 0..count-1.
void laguerre_functions(double t, double sigma, int count, std::vector<double>& out) {
  out.resize(count);
  const double x = 2.0 * sigma * t;
  double prev = 0.0, cur = std::exp(-sigma * t);
  for (int n = 0; n < count; ++n) {
    out[n] = cur;
    const double next = ((2.0 * n + 1.0 - x) * cur - n * prev) / (n + 1.0);
    prev = cur;
    cur = next;
  }
}

}  // namespace

WienerHopfProblem WienerHopfProblem::exp_abs(double lambda, ComplexFunction f) {
  WienerHopfProblem p;
  p.kernel = [lambda](double t) { return cplx(lambda * std::exp(-std::abs(t))); };
  p.symbol = [lambda](double xi) { return cplx(2.0 * lambda / (1.0 + xi * xi)); };
  p.f = std::move(f);
  return p;
}

WienerHopfProblem WienerHopfProblem::causal_exp(double c, ComplexFunction f) {
  WienerHopfProblem p;
  p.kernel = [c](double t) { return t > 0.0 ? cplx(c * std::exp(-t)) : cplx(0.0); };
  p.symbol = [c](double xi) { return c / (1.0 + I * xi); };
  p.f = std::move(f);
  return p;
}

cplx kernel_symbol(const WienerHopfProblem& p, double xi) {
  if (p.symbol) return p.symbol(xi);
  if (!p.kernel) throw ArgumentError("wiener_hopf: kernel missing");
  const double width = std::min(0.5, pi / (std::abs(xi) + 1.0));
  auto g = [&](double t) { return p.kernel(t) * std::exp(-I * xi * t); };
  return integrate(g, -p.kernel_extent, 0.0, width) + integrate(g, 0.0, p.kernel_extent, width);
}

int wiener_hopf_index(const WienerHopfProblem& p) {
  if (p.modes < 8 || p.modes % 2) throw ArgumentError("wiener_hopf: modes must be even and at least 8");
  for (int m = p.modes; m <= (1 << 16); m *= 2) {
    const Vector s = symbol_samples(p, m);
    if (s.cwiseAbs().minCoeff() <= 1e-8) throw IllPosedIndexError("wiener_hopf: 1 - K~ nearly vanishes");
    double total = 0.0, worst = 0.0;
    for (int j = 0; j < m; ++j) {
      const double d = std::arg(s[(j + 1) % m] / s[j]);
      total += d;
      worst = std::max(worst, std::abs(d));
    }
    // Counterclockwise in theta runs xi downward, which absorbs the minus sign.
    if (worst < 0.5 * pi) return static_cast<int>(std::lround(total / (2.0 * pi)));
  }
  throw RefineGridError("wiener_hopf: argument of 1 - K~ cannot be tracked");
}

cplx WienerHopfSolution::factor_minus(double xi) const {
  const cplx w = w_of(xi, sigma);
  cplx sum = 0.0, wn = 1.0;
  for (Eigen::Index n = 0; n < log_inside.size(); ++n, wn *= w) sum += log_inside[n] * wn;
  return std::exp(sum);
}

cplx WienerHopfSolution::factor_plus(double xi) const {
  const cplx winv = 1.0 / w_of(xi, sigma);
  cplx sum = log_outside_const, wn = winv;
  for (Eigen::Index n = 0; n < log_outside.size(); ++n, wn *= winv) sum += log_outside[n] * wn;
  return std::exp(sum);
}

cplx WienerHopfSolution::evaluate(double t) const {
  std::vector<double> phi;
  laguerre_functions(t, sigma, static_cast<int>(laguerre.size()), phi);
  cplx sum = 0.0;
  for (Eigen::Index n = 0; n < laguerre.size(); ++n) sum += laguerre[n] * phi[n];
  return sum;
}

cplx wiener_hopf_residual(const WienerHopfProblem& p, const std::function<cplx(double)>& u, double t) {
  auto g = [&](double s) { return p.kernel(t - s) * u(s); };
  const double upper = std::max(t, p.T) + p.kernel_extent;
  return u(t) - integrate(g, 0.0, t, 0.25, 20) - integrate(g, t, upper, 0.25, 20) - p.f(t);
}

WienerHopfSolution solve_wiener_hopf(const WienerHopfProblem& p) {
  if (!p.kernel || !p.f) throw ArgumentError("wiener_hopf: kernel and f are required");
  if (!(p.sigma > 0.0) || !(p.T > 0.0) || p.output_points < 2) throw ArgumentError("wiener_hopf: bad grid parameters");
  const int kappa = wiener_hopf_index(p);
  if (kappa != 0) throw NonzeroIndexError("wiener_hopf: index nonzero, equation not uniquely solvable", kappa);

  const int m = p.modes;
  const int half = m / 2;
  const Vector s = symbol_samples(p, m);

  // Unwrapped log of 1 - K~ along the nodes (kappa = 0, so it closes up).
  Vector ell(m);
  double phase = std::arg(s[0]);
  for (int j = 0; j < m; ++j) {
    ell[j] = cplx(std::log(std::abs(s[j])), phase);
    const double d = std::arg(s[(j + 1) % m] / s[j]);
    if (std::abs(d) >= 0.5 * pi) throw RefineGridError("wiener_hopf: log branch cannot be tracked");
    phase += d;
  }
  const Vector c = shifted_modes(ell);

  WienerHopfSolution out;
  out.sigma = p.sigma;
  out.kappa = 0;
  cplx inside_sum = 0.0;
  for (int n = 0; n < half; ++n) inside_sum += c[n];
  out.log_inside = c.head(half);
  out.log_inside[0] -= inside_sum;
  out.log_outside_const = inside_sum;
  out.log_outside.resize(half);
  for (int k = 0; k < half; ++k) out.log_outside[k] = c[m - 1 - k];
  out.tail_mode = std::max(std::abs(c[half - 1]), std::abs(c[half]));

  Vector lin = Vector::Zero(m), lout = Vector::Zero(m);
  lin.head(half) = out.log_inside;
  lout[0] = out.log_outside_const;
  for (int k = 0; k < half; ++k) lout[m - 1 - k] = out.log_outside[k];
  const Vector kminus = shifted_samples(lin).array().exp().matrix();
  const Vector kplus = shifted_samples(lout).array().exp().matrix();

  // Wrong-side modes after taking logs of the factor samples again.
  auto relog = [&](const Vector& v) {
    Vector l(m);
    double ph = std::arg(v[0]);
    for (int j = 0; j < m; ++j) {
      l[j] = cplx(std::log(std::abs(v[j])), ph);
      ph += std::arg(v[(j + 1) % m] / v[j]);
    }
    return shifted_modes(l);
  };
  const Vector cm = relog(kminus), cp = relog(kplus);
  for (int k = half; k < m; ++k) out.wrong_half_plane = std::max(out.wrong_half_plane, std::abs(cm[k]));
  for (int k = 1; k < half; ++k) out.wrong_half_plane = std::max(out.wrong_half_plane, std::abs(cp[k]));

  // Laguerre coefficients of f: b_n = 2 sigma int f exp(-sigma t) L_n(2 sigma t) dt.
  Vector b = Vector::Zero(m);
  {
    RealVector gx, gw;
    quad::gauss_legendre(16, gx, gw);
    const double width = 0.25;
    const int panels = static_cast<int>(std::ceil(p.data_extent / width));
    const double h = p.data_extent / panels;
    std::vector<double> phi;
    for (int q = 0; q < panels; ++q) {
      for (int i = 0; i < 16; ++i) {
        const double t = q * h + 0.5 * h * (gx[i] + 1.0);
        const cplx fv = p.f(t) * (0.5 * h * gw[i] * 2.0 * p.sigma);
        laguerre_functions(t, p.sigma, half, phi);
        for (int n = 0; n < half; ++n) b[n] += fv * phi[n];
      }
    }
  }

  // u~ = K~_-^{-1} P_causal(f~ K~_+^{-1}); causal projection keeps modes n >= 0.
  const Vector quotient = shifted_samples(b).cwiseQuotient(kplus);
  const Vector projected = shifted_samples(keep_nonnegative(shifted_modes(quotient)));
  const Vector coeffs = shifted_modes(projected.cwiseQuotient(kminus));
  out.laguerre = coeffs.head(half);

  out.t = RealVector::LinSpaced(p.output_points, 0.0, p.T);
  out.u.resize(p.output_points);
  for (int i = 0; i < p.output_points; ++i) out.u[i] = out.evaluate(out.t[i]);

  auto u = [&](double t) { return out.evaluate(t); };
  for (int i = 0; i < p.output_points; ++i) {
    if (out.t[i] > 0.5 * p.T + 1e-12) break;
    out.residual = std::max(out.residual, std::abs(wiener_hopf_residual(p, u, out.t[i])));
  }
  return out;
}

}  // namespace iew::singular
