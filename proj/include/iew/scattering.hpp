#pragma once

// Acoustic scattering by one small sphere: low-frequency charges and
// amplitudes, the polarizability tensor, and boundary-integral oracles on
// the sphere surface.

#include <optional>

#include "iew/grid_quad.hpp"

namespace iew::scattering {

using Mat3 = Eigen::Matrix3d;

enum class Boundary { impedance, dirichlet, neumann };

struct Body {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
  Boundary bc = Boundary::impedance;
  cplx zeta = 0.0;  ///< impedance, Im zeta <= 0

  static Body impedance(const Vec3& center, double a, cplx zeta);
  static Body dirichlet(const Vec3& center, double a);
  static Body neumann(const Vec3& center, double a);

  double surface_area() const;
  double volume() const;
  /// Sphere capacitance 4 pi a.
  double capacitance() const;
};

struct IncidentWave {
  double k = 1.0;
  Vec3 alpha = Vec3::UnitZ();

  IncidentWave() = default;
  IncidentWave(double k, const Vec3& alpha);

  cplx operator()(const Vec3& x) const;
  /// d u0 / dN = i k (alpha . N) u0
  cplx normal_derivative(const Vec3& x, const Vec3& n) const;
};

/// Largest ka accepted by the asymptotic formulas.
inline constexpr double ka_limit = 0.1;

/// Q = -zeta |S| u0(x1) (impedance) or -C u0(x1) (dirichlet).
cplx single_body_charge(const Body& body, const IncidentWave& wave);

/// Scattering amplitude in direction beta. Neumann bodies use the
/// polarizability tensor, computed on a 16 x 32 rule when not supplied.
cplx amplitude(const Body& body, const IncidentWave& wave, const Vec3& beta,
               const std::optional<Mat3>& tensor = std::nullopt);

/// Nystrom matrix of sigma -> int_S 2 dg(s,t)/dN_s sigma(t) dt on a sphere
/// rule. The self-patch carries the curvature limit -R_j / (2 a).
Matrix assemble_normal_derivative(const quad::QuadRule& rule, double k);

/// beta_pq = (1/|D|) int_S (t_p - c_p) sigma_q dt with sigma_q = A0 sigma_q - 2 N_q.
Mat3 polarizability_tensor(const Body& body, const quad::QuadRule& rule);

struct BoundarySolution {
  Vector sigma;
  cplx Q = 0.0;  ///< int_S sigma
};

/// Impedance: ((A - I)/2 - zeta G) sigma = zeta u0 - du0/dN.
/// Dirichlet: G sigma = -u0.
BoundarySolution solve_boundary_integral(const Body& body, const IncidentWave& wave, const quad::QuadRule& rule);

}  // namespace iew::scattering
