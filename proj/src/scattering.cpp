#include "iew/scattering.hpp"

#include <cmath>

#include "iew/errors.hpp"
#include "iew/linalg.hpp"
#include "iew/parallel.hpp"

namespace iew::scattering {

namespace {

void check_regime(const Body& body, const IncidentWave& wave) {
  if (wave.k * body.radius > ka_limit) throw RegimeError("small-body asymptotics need ka <= 0.1");
}

void check_rule(const Body& body, const quad::QuadRule& rule) {
  if (rule.kind() != quad::DomainKind::sphere) throw ArgumentError("sphere rule required");
  if (std::abs(rule.radius() - body.radius) > 1e-12 * body.radius || (rule.center() - body.center).norm() > 1e-12 * body.radius)
    throw ArgumentError("rule does not match the body surface");
}

}  // namespace

Body Body::impedance(const Vec3& center, double a, cplx zeta) {
  if (!(a > 0.0)) throw ArgumentError("body radius must be positive");
  if (zeta.imag() > 0.0) throw ArgumentError("impedance needs Im zeta <= 0");
  return {center, a, Boundary::impedance, zeta};
}

Body Body::dirichlet(const Vec3& center, double a) {
  if (!(a > 0.0)) throw ArgumentError("body radius must be positive");
  return {center, a, Boundary::dirichlet, 0.0};
}

Body Body::neumann(const Vec3& center, double a) {
  if (!(a > 0.0)) throw ArgumentError("body radius must be positive");
  return {center, a, Boundary::neumann, 0.0};
}

double Body::surface_area() const { return 4.0 * pi * radius * radius; }
double Body::volume() const { return 4.0 * pi * radius * radius * radius / 3.0; }
double Body::capacitance() const { return 4.0 * pi * radius; }

IncidentWave::IncidentWave(double k_, const Vec3& alpha_) : k(k_), alpha(alpha_) {
  if (!(k > 0.0)) throw ArgumentError("wavenumber must be positive");
  if (std::abs(alpha.norm() - 1.0) > 1e-12) throw ArgumentError("incidence direction must be a unit vector");
}

cplx IncidentWave::operator()(const Vec3& x) const { return std::exp(I * (k * alpha.dot(x))); }

cplx IncidentWave::normal_derivative(const Vec3& x, const Vec3& n) const {
  return I * k * alpha.dot(n) * (*this)(x);
}

cplx single_body_charge(const Body& body, const IncidentWave& wave) {
  check_regime(body, wave);
  switch (body.bc) {
    case Boundary::impedance:
      return -body.zeta * body.surface_area() * wave(body.center);
    case Boundary::dirichlet:
      return -body.capacitance() * wave(body.center);
    case Boundary::neumann:
      break;
  }
  throw ConfigurationError("neumann bodies have no leading-order charge; use the amplitude");
}

cplx amplitude(const Body& body, const IncidentWave& wave, const Vec3& beta, const std::optional<Mat3>& tensor) {
  check_regime(body, wave);
  if (std::abs(beta.norm() - 1.0) > 1e-12) throw ArgumentError("observation direction must be a unit vector");
  const cplx u0 = wave(body.center);
  switch (body.bc) {
    case Boundary::impedance:
      return -body.zeta * body.surface_area() * u0 / (4.0 * pi);
    case Boundary::dirichlet:
      return -body.capacitance() * u0 / (4.0 * pi);
    case Boundary::neumann: {
      const Mat3 t = tensor ? *tensor
                            : polarizability_tensor(body, quad::build_sphere_rule(16, 32, body.radius, body.center));
      const double k2 = wave.k * wave.k;
      // (|D|/4pi)(ik beta_pq du0/dx_q beta_p + lap u0) with du0/dx_q = ik alpha_q u0, lap u0 = -k^2 u0.
      const double contraction = beta.dot(t * wave.alpha);
      return -(k2 * body.volume() / (4.0 * pi)) * (1.0 + contraction) * u0;
    }
  }
  return 0.0;
}

Matrix assemble_normal_derivative(const quad::QuadRule& rule, double k) {
  if (rule.kind() != quad::DomainKind::sphere) throw ArgumentError("sphere rule required");
  const auto n = static_cast<Eigen::Index>(rule.size());
  const auto& p = rule.points();
  const auto& nrm = rule.normals();
  const RealVector& w = rule.weights();
  Matrix a(n, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii) {
    const auto i = static_cast<Eigen::Index>(ii);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) {
        a(i, i) = -quad::equivalent_disk_radius(w[i]) / (2.0 * rule.radius());
        continue;
      }
      const Vec3 d = p[ii] - p[static_cast<std::size_t>(j)];
      const double r = d.norm();
      const cplx dg = d.dot(nrm[ii]) / r * std::exp(I * (k * r)) * (I * (k * r) - 1.0) / (4.0 * pi * r * r);
      a(i, j) = 2.0 * dg * w[j];
    }
  });
  return a;
}

Mat3 polarizability_tensor(const Body& body, const quad::QuadRule& rule) {
  check_rule(body, rule);
  const auto n = static_cast<Eigen::Index>(rule.size());
  const Matrix a0 = assemble_normal_derivative(rule, 0.0);
  Eigen::PartialPivLU<Matrix> lu(Matrix::Identity(n, n) - a0);
  if (!(lu.rcond() > 1e-12)) throw SingularSystemError("polarizability: boundary system is singular; refine the rule", 1.0 / lu.rcond());
  Mat3 beta;
  const RealVector& w = rule.weights();
  for (int q = 0; q < 3; ++q) {
    Vector rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) rhs[i] = -2.0 * rule.normals()[static_cast<std::size_t>(i)][q];
    const Vector sigma = lu.solve(rhs);
    for (int pp = 0; pp < 3; ++pp) {
      cplx s = 0.0;
      for (Eigen::Index i = 0; i < n; ++i)
        s += w[i] * (rule.points()[static_cast<std::size_t>(i)][pp] - body.center[pp]) * sigma[i];
      beta(pp, q) = s.real() / body.volume();
    }
  }
  return beta;
}

BoundarySolution solve_boundary_integral(const Body& body, const IncidentWave& wave, const quad::QuadRule& rule) {
  check_rule(body, rule);
  if (body.bc == Boundary::neumann) throw ConfigurationError("boundary oracle covers impedance and dirichlet bodies");
  const auto n = static_cast<Eigen::Index>(rule.size());
  const Matrix g = quad::assemble_nystrom(quad::Kernel::helmholtz_g(wave.k), rule, true).matrix();
  Vector u0(n), u0n(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    u0[i] = wave(rule.points()[ii]);
    u0n[i] = wave.normal_derivative(rule.points()[ii], rule.normals()[ii]);
  }
  BoundarySolution out;
  try {
    if (body.bc == Boundary::dirichlet) {
      out.sigma = linalg::dense_solve(g, -u0, 1e-13);
    } else {
      const Matrix a = assemble_normal_derivative(rule, wave.k);
      const Matrix sys = 0.5 * (a - Matrix::Identity(n, n)) - body.zeta * g;
      out.sigma = linalg::dense_solve(sys, body.zeta * u0 - u0n, 1e-13);
    }
  } catch (const SingularSystemError& e) {
    throw SingularSystemError("boundary system is singular; refine the rule", e.condition_estimate());
  }
  out.Q = rule.integrate_samples(out.sigma);
  return out;
}

}  // namespace iew::scattering
