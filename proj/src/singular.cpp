#include "iew/singular.hpp"

#include <cmath>
#include <unsupported/Eigen/FFT>

#include "iew/errors.hpp"

namespace iew::singular {

namespace {

int slot(int n, int m) { return n >= 0 ? n : n + m; }
int signed_mode(int k, int m) { return k < m / 2 ? k : k - m; }

Vector forward(const Vector& s) {
  Eigen::FFT<double> fft;
  std::vector<cplx> in(s.data(), s.data() + s.size()), out;
  fft.fwd(out, in);
  Vector c = Eigen::Map<Vector>(out.data(), static_cast<Eigen::Index>(out.size()));
  return c / static_cast<double>(s.size());
}

Vector inverse(const Vector& c) {
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  std::vector<cplx> in(c.data(), c.data() + c.size()), out;
  fft.inv(out, in);
  return Eigen::Map<Vector>(out.data(), static_cast<Eigen::Index>(out.size()));
}

void check_size(int m) {
  if (m < 4 || m % 2) throw ArgumentError("circle function: sample count must be even and at least 4");
}

// Per-step argument increments of samples, in (-pi, pi].
std::vector<double> increments(const Vector& s) {
  std::vector<double> d(static_cast<std::size_t>(s.size()));
  for (Eigen::Index j = 0; j < s.size(); ++j) d[j] = std::arg(s[(j + 1) % s.size()] / s[j]);
  return d;
}

int winding_from(const std::function<Vector(int)>& sampler, int m0) {
  for (int m = m0; m <= (1 << 20); m *= 2) {
    const Vector s = sampler(m);
    if (s.cwiseAbs().minCoeff() <= 1e-8) throw IllPosedIndexError("symbol nearly vanishes on the circle");
    double total = 0.0, worst = 0.0;
    for (double d : increments(s)) {
      total += d;
      worst = std::max(worst, std::abs(d));
    }
    if (worst < 0.5 * pi) return static_cast<int>(std::lround(total / (2.0 * pi)));
  }
  throw RefineGridError("argument increments stay above pi/2 after refinement");
}

}  // namespace

CircleFunction CircleFunction::from_samples(Vector samples) {
  check_size(static_cast<int>(samples.size()));
  return CircleFunction(std::move(samples));
}

CircleFunction CircleFunction::from_modes(const std::map<int, cplx>& modes, int size) {
  check_size(size);
  Vector c = Vector::Zero(size);
  for (const auto& [n, v] : modes) {
    if (n < -size / 2 || n >= size / 2) throw ArgumentError("circle function: mode outside the band");
    c[slot(n, size)] = v;
  }
  return CircleFunction(inverse(c));
}

CircleFunction CircleFunction::from_function(const std::function<cplx(cplx)>& g, int size) {
  check_size(size);
  Vector s(size);
  for (int j = 0; j < size; ++j) s[j] = g(node(j, size));
  return CircleFunction(std::move(s));
}

CircleFunction CircleFunction::constant(cplx c, int size) {
  check_size(size);
  return CircleFunction(Vector::Constant(size, c));
}

CircleFunction CircleFunction::monomial(int n, int size, cplx c) { return from_modes({{n, c}}, size); }

cplx CircleFunction::node(int j, int size) { return std::polar(1.0, 2.0 * pi * j / size); }

Vector CircleFunction::modes() const { return forward(samples_); }

cplx CircleFunction::mode(int n) const {
  const int m = size();
  if (n < -m / 2 || n >= m / 2) return 0.0;
  return modes()[slot(n, m)];
}

namespace {

cplx laurent(const Vector& c, cplx z, int lo, int hi) {
  const int m = static_cast<int>(c.size());
  cplx sum = 0.0;
  for (int k = 0; k < m; ++k) {
    const int n = signed_mode(k, m);
    if (n < lo || n >= hi || c[k] == 0.0) continue;
    sum += c[k] * std::pow(z, n);
  }
  return sum;
}

}  // namespace

cplx CircleFunction::operator()(cplx z) const { return laurent(modes(), z, -size(), size()); }
cplx CircleFunction::eval_inside(cplx z) const { return laurent(modes(), z, 0, size()); }
cplx CircleFunction::eval_outside(cplx z) const { return laurent(modes(), z, -size(), 0); }

CircleFunction CircleFunction::resampled(int new_size) const {
  check_size(new_size);
  const Vector c = modes();
  Vector d = Vector::Zero(new_size);
  const int m = size();
  for (int k = 0; k < m; ++k) {
    const int n = signed_mode(k, m);
    if (n >= -new_size / 2 && n < new_size / 2) d[slot(n, new_size)] = c[k];
  }
  return CircleFunction(inverse(d));
}

CircleFunction CircleFunction::nonnegative_part() const {
  Vector c = modes();
  for (int k = size() / 2; k < size(); ++k) c[k] = 0.0;
  return CircleFunction(inverse(c));
}

CircleFunction CircleFunction::negative_part() const {
  Vector c = modes();
  for (int k = 0; k < size() / 2; ++k) c[k] = 0.0;
  return CircleFunction(inverse(c));
}

void CircleFunction::same_size(const CircleFunction& o) const {
  if (o.size() != size()) throw ArgumentError("circle functions sampled at different sizes");
}

CircleFunction CircleFunction::operator+(const CircleFunction& o) const {
  same_size(o);
  return CircleFunction(samples_ + o.samples_);
}
CircleFunction CircleFunction::operator-(const CircleFunction& o) const {
  same_size(o);
  return CircleFunction(samples_ - o.samples_);
}
CircleFunction CircleFunction::operator*(const CircleFunction& o) const {
  same_size(o);
  return CircleFunction(samples_.cwiseProduct(o.samples_));
}
CircleFunction CircleFunction::operator/(const CircleFunction& o) const {
  same_size(o);
  return CircleFunction(samples_.cwiseQuotient(o.samples_));
}
CircleFunction CircleFunction::operator*(cplx c) const { return CircleFunction(samples_ * c); }
CircleFunction CircleFunction::operator-() const { return CircleFunction(-samples_); }

CircleFunction cauchy_apply(const CircleFunction& u) { return u.nonnegative_part() - u.negative_part(); }

std::pair<CircleFunction, CircleFunction> plemelj_limits(const CircleFunction& u) {
  return {u.nonnegative_part(), -u.negative_part()};
}

int winding_number(const CircleFunction& g) {
  return winding_from([&](int m) { return m == g.size() ? g.samples() : g.resampled(m).samples(); }, g.size());
}

int index(const CircleFunction& a, const CircleFunction& b) {
  if (a.size() != b.size()) throw ArgumentError("index: a and b sampled at different sizes");
  return winding_from(
      [&](int m) {
        const CircleFunction ar = m == a.size() ? a : a.resampled(m);
        const CircleFunction br = m == b.size() ? b : b.resampled(m);
        const Vector sum = ar.samples() + br.samples();
        const Vector diff = ar.samples() - br.samples();
        if (sum.cwiseAbs().minCoeff() <= 1e-8 || diff.cwiseAbs().minCoeff() <= 1e-8)
          throw IllPosedIndexError("a + b or a - b nearly vanishes on the circle");
        return Vector(diff.cwiseQuotient(sum));
      },
      a.size());
}

RiemannSolution solve_riemann(const RiemannProblem& p, double condition_tol) {
  const int m = p.G.size();
  if (p.g.size() != m) throw ArgumentError("solve_riemann: G and g sampled at different sizes");
  if (p.G.samples().cwiseAbs().minCoeff() <= 1e-8) throw IllPosedIndexError("solve_riemann: G nearly vanishes");

  RiemannSolution out;
  out.kappa = winding_number(p.G);
  const int kappa = out.kappa;

  // log(z^{-kappa} G) with the argument unwrapped along the nodes.
  const CircleFunction deflated = CircleFunction::monomial(-kappa, m) * p.G;
  const Vector& d = deflated.samples();
  const std::vector<double> inc = increments(d);
  Vector ell(m);
  double phase = std::arg(d[0]);
  for (int j = 0; j < m; ++j) {
    if (std::abs(inc[j]) >= 0.5 * pi) throw RefineGridError("solve_riemann: log branch cannot be tracked");
    ell[j] = cplx(std::log(std::abs(d[j])), phase);
    phase += inc[j];
  }
  const CircleFunction log_d = CircleFunction::from_samples(ell);
  out.Gamma_plus = log_d.nonnegative_part();
  out.Gamma_minus = -log_d.negative_part();
  out.X_plus = CircleFunction::from_samples(out.Gamma_plus.samples().array().exp().matrix());
  out.X_minus = CircleFunction::monomial(-kappa, m) *
                CircleFunction::from_samples(out.Gamma_minus.samples().array().exp().matrix());

  const CircleFunction h = p.g / out.X_plus;
  auto [psi_p, psi_m] = plemelj_limits(h);
  out.phi_plus = out.X_plus * psi_p;
  out.phi_minus = out.X_minus * psi_m;

  if (kappa >= 0) {
    out.free_poly_degree = kappa;
    for (int k = 0; k <= kappa; ++k) {
      const CircleFunction zk = CircleFunction::monomial(k, m);
      out.homogeneous.emplace_back(out.X_plus * zk, out.X_minus * zk);
    }
  } else if (kappa < -1) {
    const Vector c = h.modes();
    const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
    for (int k = 1; k <= -kappa - 1; ++k) {
      const cplx v = c[slot(-k, m)];
      out.solvability_conditions.push_back(v);
      if (std::abs(v) > condition_tol * scale) out.solvable = false;
    }
  }
  out.boundary_residual = (out.phi_plus - p.G * out.phi_minus - p.g).max_abs();
  return out;
}

DominantSolution solve_dominant(const CircleFunction& a, const CircleFunction& b, const CircleFunction& f,
                                double condition_tol) {
  const int m = a.size();
  if (b.size() != m || f.size() != m) throw ArgumentError("solve_dominant: inputs sampled at different sizes");
  const CircleFunction sum = a + b, diff = a - b;
  if (sum.samples().cwiseAbs().minCoeff() <= 1e-8 || diff.samples().cwiseAbs().minCoeff() <= 1e-8)
    throw IllPosedIndexError("solve_dominant: a + b or a - b nearly vanishes");

  const RiemannSolution rs = solve_riemann({diff / sum, f / sum}, condition_tol);
  DominantSolution out;
  out.kappa = rs.kappa;
  // The density is recovered from a Cauchy integral, so phi_minus must vanish
  // at infinity: P has degree kappa - 1 and |kappa| modes of g / X+ must vanish.
  if (rs.kappa > 0) {
    out.free_parameters = rs.kappa;
    for (int k = 0; k < rs.kappa; ++k) {
      const CircleFunction zk = CircleFunction::monomial(k, m);
      out.homogeneous.push_back(rs.X_plus * zk - rs.X_minus * zk);
    }
  } else if (rs.kappa < 0) {
    const Vector c = ((f / sum) / rs.X_plus).modes();
    const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
    for (int k = 1; k <= -rs.kappa; ++k) {
      const cplx v = c[slot(-k, m)];
      out.solvability_conditions.push_back(v);
      if (std::abs(v) > condition_tol * scale) out.solvable = false;
    }
  }
  out.u = rs.phi_plus - rs.phi_minus;
  out.residual = (a * out.u + b * cauchy_apply(out.u) - f).max_abs();
  return out;
}

FullLineResult solve_fullline_convolution(const LineGrid& grid, const Vector& k_samples, const Vector& f_samples,
                                          cplx lambda) {
  const int n = grid.n;
  if (n < 8 || !(grid.h > 0.0)) throw ArgumentError("fullline: need n >= 8 and h > 0");
  if (k_samples.size() != n || f_samples.size() != n) throw ArgumentError("fullline: sample count mismatch");
  auto decays = [](const Vector& s) {
    const double peak = s.cwiseAbs().maxCoeff();
    return std::abs(s[0]) <= 1e-10 * peak && std::abs(s[s.size() - 1]) <= 1e-10 * peak;
  };
  if (!decays(k_samples) || !decays(f_samples)) throw ArgumentError("fullline: kernel and data must decay at the grid ends");

  const int p = 4 * n;
  Vector kc = Vector::Zero(p), fp = Vector::Zero(p);
  for (int j = 0; j < n; ++j) {
    kc[((j - n / 2) % p + p) % p] = k_samples[j] * grid.h;
    fp[j] = f_samples[j];
  }
  Eigen::FFT<double> fft;
  std::vector<cplx> kin(kc.data(), kc.data() + p), fin(fp.data(), fp.data() + p), khat, fhat, u;
  fft.fwd(khat, kin);
  fft.fwd(fhat, fin);
  double peak = std::abs(lambda);
  for (const cplx& v : khat) peak = std::max(peak, std::abs(v));
  for (int k = 0; k < p; ++k) {
    const cplx sym = lambda - khat[k];
    if (std::abs(sym) <= 1e-8 * std::max(peak, 1e-300))
      throw SingularSystemError("fullline: symbol lambda - K~ vanishes on the frequency grid", INFINITY);
    fhat[k] /= sym;
  }
  fft.inv(u, fhat);
  FullLineResult out;
  out.u = Eigen::Map<Vector>(u.data(), n);
  const Vector r = fullline_residual(grid, k_samples, f_samples, lambda, out.u);
  out.interior_residual = r.segment(n / 4, n / 2).cwiseAbs().maxCoeff();
  return out;
}

Vector fullline_residual(const LineGrid& grid, const Vector& k_samples, const Vector& f_samples, cplx lambda,
                         const Vector& u) {
  const int n = grid.n;
  Vector r(n);
  for (int i = 0; i < n; ++i) {
    cplx conv = 0.0;
    for (int j = 0; j < n; ++j) {
      const int lag = i - j + n / 2;
      if (lag >= 0 && lag < n) conv += k_samples[lag] * u[j];
    }
    r[i] = lambda * u[i] - grid.h * conv - f_samples[i];
  }
  return r;
}

}  // namespace iew::singular
