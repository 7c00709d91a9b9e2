#pragma once

// Many small impedance spheres: particle placement from a density, the
// linear algebraic system for the effective field, reduction to cubes, the
// continuum limit and the refraction coefficient it produces.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "iew/scattering.hpp"

namespace iew::scattering {

struct Box {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Ones();
  Vec3 size() const { return hi - lo; }
  double volume() const { return size().prod(); }
};

struct Medium {
  Box omega;
  std::function<double(const Vec3&)> N = [](const Vec3&) { return 1.0; };  ///< density, >= 0
  std::function<cplx(const Vec3&)> h = [](const Vec3&) { return cplx(0.0); };  ///< Im h <= 0
  double c = 4.0 * pi;  ///< |S_m| = c a^2; spheres
  double k = 1.0;
};

/// n^2(x) = 1 - k^{-2} c N(x) h(x)
cplx refraction(const Medium& m, const Vec3& x);

/// Axis-aligned partition of the medium box into cubes of side b.
struct CubePartition {
  Box omega;
  double b = 0.25;
  int nx = 1, ny = 1, nz = 1;

  CubePartition() = default;
  CubePartition(const Box& omega, double b);
  int count() const { return nx * ny * nz; }
  int cube_of(const Vec3& x) const;
  Vec3 center(int q) const;
  Box cube(int q) const;
};

struct PlacementOptions {
  double b = 0.25;  ///< cube side
  std::uint64_t seed = 1;
  double jitter = 0.3;  ///< fraction of the half cell width
};

struct ParticleCloud {
  std::vector<Vec3> points;
  std::vector<int> cube;        ///< cube index of each point
  std::vector<cplx> h_values;   ///< h(x_m)
  std::vector<cplx> zeta;       ///< h(x_m) / a^kappa
  std::vector<int> cube_counts;
  std::vector<double> cube_targets;  ///< a^{-(2-kappa)} int_cube N
  CubePartition partition;
  double a = 0.0;
  double kappa = 0.0;
  double c = 4.0 * pi;
  double d = 0.0;  ///< guaranteed minimum spacing
  /// a <= d/10 and d <= b/10.
  bool separation_ordering = false;

  std::size_t size() const { return points.size(); }
};

/// Places round(a^{-(2-kappa)} int_cube N) points per cube on a seeded,
/// jittered subgrid. Counts are rounded cumulatively so the total matches the
/// rounded total. Throws InfeasibleDensityError when points would come closer
/// than 2a.
ParticleCloud place_particles(const Medium& medium, double a, double kappa, const PlacementOptions& options = {});

struct ManyBodyOptions {
  std::size_t dense_limit = 1500;
  double tol = 1e-10;
  int max_iter = 400;
};

struct ManyBodyResult {
  Vector u;  ///< effective field at the particles
  Vector Q;  ///< -c h_m u_m a^{2-kappa}
  bool dense = true;
  int iterations = 0;
  double residual = 0.0;
};

/// u_j + c sum_{m != j} g_jm h_m a^{2-kappa} u_m = u0(x_j)
ManyBodyResult many_body_solve(const ParticleCloud& cloud, const IncidentWave& wave, const ManyBodyOptions& options = {});

/// g(x_j, x_m) with a zero diagonal.
Matrix interaction_matrix(const std::vector<Vec3>& points, double k);

/// out_j = sum_{m != j} g(x_j, x_m) q_m, matrix free.
Vector pair_sum(const std::vector<Vec3>& points, const Vector& q, double k);

struct CubeReduction {
  std::vector<Vec3> centers;
  Vector u;              ///< reduced field at cube centers
  Vector las_average;    ///< per-cube mean of the many-body field, when supplied
  double max_relative_deviation = 0.0;
};

/// u_q + c sum_{p != q} g_qp h_p u_p int_{cube p} N = u0(x_q)
CubeReduction reduce_to_cubes(const ParticleCloud& cloud, const Medium& medium, const IncidentWave& wave,
                              const ManyBodyResult* las = nullptr);

struct EffectiveMediumOptions {
  std::size_t dense_limit = 1728;
  double tol = 1e-10;
  int max_iter = 400;
};

struct EffectiveMediumResult {
  std::vector<Vec3> points;  ///< cell centers
  Vector u;
  Vector n2;
  double cell = 0.0;
  int grid_n = 0;
  int iterations = 0;
};

/// Cell-centred Nystrom solve of u = u0 - c int g h N u over the medium box,
/// with the self-cell integral of g evaluated by a pyramid decomposition.
EffectiveMediumResult effective_medium_solve(const Medium& medium, const IncidentWave& wave, int grid_n,
                                             const EffectiveMediumOptions& options = {});

/// int_cube e^{ik|y|} / (4 pi |y|) dy over a cube of side s centred at 0.
cplx self_cell_integral(double s, double k);

/// Per-cube means of values sampled at points.
Vector cube_average(const CubePartition& partition, const std::vector<Vec3>& points, const Vector& values);

/// max over cubes of |mean LAS - mean continuum| / |mean continuum|.
double las_continuum_discrepancy(const ParticleCloud& cloud, const ManyBodyResult& las,
                                 const EffectiveMediumResult& continuum);

}  // namespace iew::scattering
