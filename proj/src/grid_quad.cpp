#include "iew/grid_quad.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "iew/parallel.hpp"

namespace iew::quad {

double QuadRule::measure() const {
  switch (kind_) {
    case DomainKind::interval:
      return upper_ - lower_;
    case DomainKind::circle:
      return 2.0 * pi;
    case DomainKind::sphere:
      return 4.0 * pi * radius_ * radius_;
  }
  return 0.0;
}

Vec3 QuadRule::point(std::size_t i) const {
  if (kind_ == DomainKind::sphere) return points_[i];
  return Vec3(nodes_[static_cast<Eigen::Index>(i)], 0.0, 0.0);
}

cplx QuadRule::integrate_samples(const Vector& samples) const {
  if (static_cast<std::size_t>(samples.size()) != size())
    throw ArgumentError("integrate_samples: sample count does not match rule");
  cplx sum = 0.0;
  for (Eigen::Index i = 0; i < samples.size(); ++i) sum += weights_[i] * samples[i];
  return sum;
}

void gauss_legendre(int n, RealVector& nodes, RealVector& weights) {
  if (n < 1) throw ArgumentError("gauss_legendre: n must be positive");
  nodes.resize(n);
  weights.resize(n);
  if (n == 1) {
    nodes[0] = 0.0;
    weights[0] = 2.0;
    return;
  }
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-16) break;
    }
    // Recompute derivative at the converged node for the weight.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

QuadRule build_interval_rule(IntervalKind kind, int n, double a, double b) {
  if (n < 2) throw ArgumentError("build_interval_rule: need at least 2 nodes");
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
    throw ArgumentError("build_interval_rule: require finite a < b");
  QuadRule rule;
  rule.kind_ = DomainKind::interval;
  rule.lower_ = a;
  rule.upper_ = b;
  rule.nodes_.resize(n);
  rule.weights_.resize(n);
  if (kind == IntervalKind::trapezoid) {
    const double h = (b - a) / (n - 1);
    for (int i = 0; i < n; ++i) {
      rule.nodes_[i] = (i == n - 1) ? b : a + i * h;
      rule.weights_[i] = (i == 0 || i == n - 1) ? 0.5 * h : h;
    }
  } else {
    RealVector x, w;
    gauss_legendre(n, x, w);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    rule.nodes_ = (mid + half * x.array()).matrix();
    rule.weights_ = half * w;
  }
  return rule;
}

QuadRule build_circle_rule(int n) {
  if (n < 4 || n % 2 != 0) throw ArgumentError("build_circle_rule: n must be even and >= 4");
  QuadRule rule;
  rule.kind_ = DomainKind::circle;
  rule.lower_ = 0.0;
  rule.upper_ = 2.0 * pi;
  rule.nodes_.resize(n);
  rule.weights_ = RealVector::Constant(n, 2.0 * pi / n);
  for (int j = 0; j < n; ++j) rule.nodes_[j] = 2.0 * pi * j / n;
  return rule;
}

QuadRule build_sphere_rule(int n_theta, int n_phi, double radius, const Vec3& center) {
  if (!(radius > 0.0)) throw ArgumentError("build_sphere_rule: radius must be positive");
  if (n_theta < 4 || n_phi < 8) throw ArgumentError("build_sphere_rule: need n_theta >= 4 and n_phi >= 8");
  QuadRule rule;
  rule.kind_ = DomainKind::sphere;
  rule.radius_ = radius;
  rule.center_ = center;
  RealVector x, w;
  gauss_legendre(n_theta, x, w);
  const int n = n_theta * n_phi;
  rule.weights_.resize(n);
  rule.points_.reserve(n);
  rule.normals_.reserve(n);
  const double dphi = 2.0 * pi / n_phi;
  for (int i = 0; i < n_theta; ++i) {
    const double ct = x[i];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int j = 0; j < n_phi; ++j) {
      const double phi = j * dphi;
      const Vec3 normal(st * std::cos(phi), st * std::sin(phi), ct);
      rule.normals_.push_back(normal);
      rule.points_.push_back(center + radius * normal);
      rule.weights_[i * n_phi + j] = radius * radius * w[i] * dphi;
    }
  }
  return rule;
}

double equivalent_disk_radius(double patch_area) { return std::sqrt(patch_area / pi); }

// ---------------------------------------------------------------------------

Kernel Kernel::constant(cplx c) {
  Kernel k("const", [c](const Vec3&, const Vec3&) { return c; }, true, false);
  k.params_["c"] = c.real();
  if (c.imag() != 0.0) k.params_["c_im"] = c.imag();
  return k;
}

Kernel Kernel::sin_diff() {
  return Kernel(
      "sin_diff", [](const Vec3& x, const Vec3& y) { return cplx(std::sin(x[0] - y[0]), 0.0); }, false, false);
}

Kernel Kernel::exp_abs() {
  return Kernel(
      "exp_abs", [](const Vec3& x, const Vec3& y) { return cplx(std::exp(-(x - y).norm()), 0.0); }, true,
      false);
}

Kernel Kernel::helmholtz_g(double k) {
  Kernel ker(
      "helmholtz_g",
      [k](const Vec3& x, const Vec3& y) {
        const double r = (x - y).norm();
        return std::exp(I * (k * r)) / (4.0 * pi * r);
      },
      true, true);
  ker.params_["k"] = k;
  ker.wavenumber_ = k;
  return ker;
}

Kernel Kernel::laplace_g() {
  return Kernel(
      "laplace_g", [](const Vec3& x, const Vec3& y) { return cplx(1.0 / (4.0 * pi * (x - y).norm()), 0.0); },
      true, true);
}

namespace {

std::size_t bracket(const RealVector& grid, double v, const char* axis) {
  const double lo = grid[0], hi = grid[grid.size() - 1];
  const double slack = 1e-12 * std::max(1.0, hi - lo);
  if (v < lo - slack || v > hi + slack) {
    std::ostringstream msg;
    msg << "tabulated kernel: " << axis << " = " << v << " outside [" << lo << ", " << hi << "]";
    throw DomainError(msg.str());
  }
  auto it = std::upper_bound(grid.data(), grid.data() + grid.size(), v);
  std::size_t idx = static_cast<std::size_t>(it - grid.data());
  if (idx == 0) idx = 1;
  if (idx >= static_cast<std::size_t>(grid.size())) idx = grid.size() - 1;
  return idx - 1;
}

}  // namespace

Kernel Kernel::tabulated(RealVector xs, RealVector ys, Matrix values) {
  if (xs.size() < 2 || ys.size() < 2 || values.rows() != xs.size() || values.cols() != ys.size())
    throw ArgumentError("tabulated kernel: need >= 2 samples per axis and matching value table");
  for (Eigen::Index i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) throw ArgumentError("tabulated kernel: x grid must increase");
  for (Eigen::Index i = 1; i < ys.size(); ++i)
    if (!(ys[i] > ys[i - 1])) throw ArgumentError("tabulated kernel: y grid must increase");
  const bool symmetric = xs.size() == ys.size() && xs.isApprox(ys) && values.isApprox(values.transpose());
  auto eval = [xs = std::move(xs), ys = std::move(ys), values = std::move(values)](const Vec3& p, const Vec3& q) {
    const double x = p[0], y = q[0];
    const std::size_t i = bracket(xs, x, "x");
    const std::size_t j = bracket(ys, y, "y");
    const double tx = std::clamp((x - xs[i]) / (xs[i + 1] - xs[i]), 0.0, 1.0);
    const double ty = std::clamp((y - ys[j]) / (ys[j + 1] - ys[j]), 0.0, 1.0);
    return (1 - tx) * (1 - ty) * values(i, j) + tx * (1 - ty) * values(i + 1, j) +
           (1 - tx) * ty * values(i, j + 1) + tx * ty * values(i + 1, j + 1);
  };
  return Kernel("tabulated", std::move(eval), symmetric, false);
}

Kernel Kernel::custom(std::string name, std::function<cplx(double, double)> f, bool symmetric) {
  return Kernel(
      std::move(name), [f = std::move(f)](const Vec3& x, const Vec3& y) { return f(x[0], y[0]); }, symmetric,
      false);
}

Kernel Kernel::from_catalog(const std::string& name, const std::map<std::string, double>& params) {
  auto get = [&](const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  if (name == "const") return constant(cplx(get("c", 0.0), get("c_im", 0.0)));
  if (name == "sin_diff") return sin_diff();
  if (name == "exp_abs") return exp_abs();
  if (name == "helmholtz_g") {
    if (!params.count("k")) throw ArgumentError("helmholtz_g requires parameter k");
    return helmholtz_g(get("k", 0.0));
  }
  if (name == "laplace_g") return laplace_g();
  throw ArgumentError("unknown kernel '" + name + "'");
}

// ---------------------------------------------------------------------------

DiscreteOperator::DiscreteOperator(QuadRule rule, Matrix matrix, bool symmetric_kernel)
    : rule_(std::move(rule)), matrix_(std::move(matrix)), symmetric_(symmetric_kernel) {
  const auto n = static_cast<Eigen::Index>(rule_.size());
  if (matrix_.rows() != n || matrix_.cols() != n)
    throw ArgumentError("DiscreteOperator: matrix shape does not match rule node count");
}

Matrix DiscreteOperator::symmetrized() const {
  const RealVector s = weights().cwiseSqrt();
  const RealVector inv = s.cwiseInverse();
  return s.asDiagonal() * matrix_ * inv.asDiagonal();
}

cplx DiscreteOperator::inner(const Vector& u, const Vector& v) const {
  cplx sum = 0.0;
  const RealVector& w = weights();
  for (Eigen::Index i = 0; i < u.size(); ++i) sum += w[i] * u[i] * std::conj(v[i]);
  return sum;
}

double DiscreteOperator::norm(const Vector& u) const { return std::sqrt(std::max(0.0, inner(u, u).real())); }

DiscreteOperator assemble_nystrom(const Kernel& kernel, const QuadRule& rule, bool singular_correction) {
  if (kernel.weakly_singular()) {
    if (!singular_correction)
      throw ConfigurationError("kernel '" + kernel.name() + "' is weakly singular; enable singular_correction");
    if (rule.kind() != DomainKind::sphere)
      throw ConfigurationError("singular correction is only available on sphere rules");
  }
  const auto n = static_cast<Eigen::Index>(rule.size());
  Matrix m(n, n);
  const RealVector& w = rule.weights();
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii) {
    const auto i = static_cast<Eigen::Index>(ii);
    const Vec3 xi = rule.point(ii);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j && kernel.weakly_singular()) continue;
      m(i, j) = kernel(xi, rule.point(static_cast<std::size_t>(j))) * w[j];
    }
  });
  if (kernel.weakly_singular()) {
    // Flat disk of equal area: int_disk 1/(4 pi r) dA = R/2; the oscillatory
    // remainder (e^{ikr} - 1)/(4 pi r) tends to ik/(4 pi).
    const double k = kernel.wavenumber();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double radius = equivalent_disk_radius(w[i]);
      m(i, i) = 0.5 * radius + I * (k * w[i] / (4.0 * pi));
    }
  }
  return DiscreteOperator(rule, std::move(m), kernel.symmetric());
}

Vector sample(const QuadRule& rule, const std::function<cplx(double)>& f) {
  Vector out(static_cast<Eigen::Index>(rule.size()));
  for (std::size_t i = 0; i < rule.size(); ++i) out[static_cast<Eigen::Index>(i)] = f(rule.nodes()[i]);
  return out;
}

}  // namespace iew::quad
