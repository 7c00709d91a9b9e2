#include "iew/many_body.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "iew/errors.hpp"
#include "iew/linalg.hpp"
#include "iew/parallel.hpp"

namespace iew::scattering {

cplx refraction(const Medium& m, const Vec3& x) { return 1.0 - m.c * m.N(x) * m.h(x) / (m.k * m.k); }

// ---------------------------------------------------------------------------

CubePartition::CubePartition(const Box& omega_, double b_) : omega(omega_), b(b_) {
  if (!(b > 0.0)) throw ArgumentError("cube side must be positive");
  const Vec3 len = omega.size();
  int* dims[3] = {&nx, &ny, &nz};
  for (int a = 0; a < 3; ++a) {
    if (!(len[a] > 0.0)) throw ArgumentError("medium box must have positive extent");
    const double ratio = len[a] / b;
    const long r = std::lround(ratio);
    if (r < 1 || std::abs(ratio - static_cast<double>(r)) > 1e-9 * std::max(1.0, ratio))
      throw ArgumentError("medium box is not a whole number of cubes of side b");
    *dims[a] = static_cast<int>(r);
  }
}

int CubePartition::cube_of(const Vec3& x) const {
  const Vec3 rel = (x - omega.lo) / b;
  const int i = std::clamp(static_cast<int>(std::floor(rel[0])), 0, nx - 1);
  const int j = std::clamp(static_cast<int>(std::floor(rel[1])), 0, ny - 1);
  const int k = std::clamp(static_cast<int>(std::floor(rel[2])), 0, nz - 1);
  return (k * ny + j) * nx + i;
}

Box CubePartition::cube(int q) const {
  const int i = q % nx, j = (q / nx) % ny, k = q / (nx * ny);
  Box out;
  out.lo = omega.lo + b * Vec3(i, j, k);
  out.hi = out.lo + Vec3::Constant(b);
  return out;
}

Vec3 CubePartition::center(int q) const {
  const Box c = cube(q);
  return 0.5 * (c.lo + c.hi);
}

namespace {

double integrate_box(const std::function<double(const Vec3&)>& f, const Box& box, int order = 4) {
  RealVector x, w;
  quad::gauss_legendre(order, x, w);
  const Vec3 mid = 0.5 * (box.lo + box.hi), half = 0.5 * box.size();
  double sum = 0.0;
  for (int i = 0; i < order; ++i)
    for (int j = 0; j < order; ++j)
      for (int k = 0; k < order; ++k)
        sum += w[i] * w[j] * w[k] * f(mid + Vec3(half[0] * x[i], half[1] * x[j], half[2] * x[k]));
  return sum * half.prod();
}

// e^{ik r} / (4 pi r) between two points. The complex exponential is a short
// Taylor series on a reduced argument followed by three squarings, which
// keeps the pair loops vectorisable.
[[gnu::always_inline]] inline void green(double dx, double dy, double dz, double k, double& gr, double& gi) {
  constexpr double inv4pi = 1.0 / (4.0 * pi);
  constexpr double inv2pi = 1.0 / (2.0 * pi);
  constexpr double twopi = 2.0 * pi;
  const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
  const double theta = k * r;
  const double t = (theta - static_cast<double>(static_cast<long long>(theta * inv2pi + 0.5)) * twopi) * 0.125;
  const double p = t * t;
  double c = 1.0 + p * (-1.0 / 2 + p * (1.0 / 24 + p * (-1.0 / 720 + p * (1.0 / 40320 + p * (-1.0 / 3628800 + p / 479001600.0)))));
  double s = t * (1.0 + p * (-1.0 / 6 + p * (1.0 / 120 + p * (-1.0 / 5040 + p * (1.0 / 362880 + p * (-1.0 / 39916800.0 + p / 6227020800.0))))));
  for (int sq = 0; sq < 3; ++sq) {
    const double c2 = c * c - s * s;
    s = 2.0 * c * s;
    c = c2;
  }
  const double scale = inv4pi / r;
  gr = c * scale;
  gi = s * scale;
}

// out_j += sum_{m != j} G(x_j, x_m) q_m
void pair_rows(const double* __restrict x, const double* __restrict y, const double* __restrict z,
               const double* __restrict qr, const double* __restrict qi, std::size_t j, std::size_t lo,
               std::size_t hi, double k, double& accr, double& acci) {
  const double xj = x[j], yj = y[j], zj = z[j];
  double ar = 0.0, ai = 0.0;
#pragma omp simd reduction(+ : ar, ai)
  for (std::size_t m = lo; m < hi; ++m) {
    double gr, gi;
    green(xj - x[m], yj - y[m], zj - z[m], k, gr, gi);
    ar += gr * qr[m] - gi * qi[m];
    ai += gr * qi[m] + gi * qr[m];
  }
  accr += ar;
  acci += ai;
}

// Upper-triangle sweep that scatters each pair into both rows.
void pair_symmetric(const double* __restrict x, const double* __restrict y, const double* __restrict z,
                    const double* __restrict qr, const double* __restrict qi, std::size_t n, double k,
                    double* __restrict outr, double* __restrict outi) {
  for (std::size_t j = 0; j < n; ++j) {
    const double xj = x[j], yj = y[j], zj = z[j], qjr = qr[j], qji = qi[j];
    double ar = 0.0, ai = 0.0;
#pragma omp simd reduction(+ : ar, ai)
    for (std::size_t m = j + 1; m < n; ++m) {
      double gr, gi;
      green(xj - x[m], yj - y[m], zj - z[m], k, gr, gi);
      ar += gr * qr[m] - gi * qi[m];
      ai += gr * qi[m] + gi * qr[m];
      outr[m] += gr * qjr - gi * qji;
      outi[m] += gr * qji + gi * qjr;
    }
    outr[j] += ar;
    outi[j] += ai;
  }
}

void pair_kernel(const double* x, const double* y, const double* z, const double* qr, const double* qi,
                 std::size_t n, double k, double* outr, double* outi) {
  if (worker_count() <= 1 || n < 4096) {
    pair_symmetric(x, y, z, qr, qi, n, k, outr, outi);
    return;
  }
  parallel_for(n, [&](std::size_t j) {
    double accr = 0.0, acci = 0.0;
    pair_rows(x, y, z, qr, qi, j, 0, j, k, accr, acci);
    pair_rows(x, y, z, qr, qi, j, j + 1, n, k, accr, acci);
    outr[j] += accr;
    outi[j] += acci;
  });
}

cplx helmholtz(const Vec3& a, const Vec3& b, double k) {
  const double r = (a - b).norm();
  return std::exp(I * (k * r)) / (4.0 * pi * r);
}

Vector incident(const std::vector<Vec3>& pts, const IncidentWave& wave) {
  Vector u0(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) u0[static_cast<Eigen::Index>(i)] = wave(pts[i]);
  return u0;
}

// Solves (I + G diag(s) + diag(d)) u = u0 densely or with GMRES.
struct SystemSolve {
  Vector u;
  bool dense = true;
  int iterations = 0;
  double residual = 0.0;
};

SystemSolve solve_pair_system(const std::vector<Vec3>& pts, const Vector& s, const Vector& diag, double k,
                              const Vector& u0, std::size_t dense_limit, double tol, int max_iter) {
  const auto n = static_cast<Eigen::Index>(pts.size());
  SystemSolve out;
  auto apply = [&](const Vector& u) -> Vector {
    return u + pair_sum(pts, s.cwiseProduct(u), k) + diag.cwiseProduct(u);
  };
  if (static_cast<std::size_t>(n) <= dense_limit) {
    Matrix a = interaction_matrix(pts, k) * s.asDiagonal();
    a.diagonal().array() += 1.0 + diag.array();
    out.u = linalg::dense_solve(a, u0, 1e-13);
    out.dense = true;
  } else {
    const linalg::GmresResult g = linalg::gmres(apply, u0, u0, tol, max_iter, 60);
    if (!g.converged)
      throw SingularSystemError("interaction system: GMRES did not converge", 1.0 / std::max(g.relative_residual, 1e-300));
    out.u = g.x;
    out.dense = false;
    out.iterations = g.iterations;
  }
  const double un = u0.norm();
  out.residual = (apply(out.u) - u0).norm() / (un > 0.0 ? un : 1.0);
  return out;
}

}  // namespace

Matrix interaction_matrix(const std::vector<Vec3>& points, double k) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Matrix g = Matrix::Zero(n, n);
  parallel_for(points.size(), [&](std::size_t i) {
    for (std::size_t j = 0; j < points.size(); ++j)
      if (j != i) g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = helmholtz(points[i], points[j], k);
  });
  return g;
}

Vector pair_sum(const std::vector<Vec3>& points, const Vector& q, double k) {
  const std::size_t n = points.size();
  if (static_cast<std::size_t>(q.size()) != n) throw ArgumentError("pair_sum: size mismatch");
  std::vector<double> x(n), y(n), z(n), qr(n), qi(n), outr(n, 0.0), outi(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = points[i][0];
    y[i] = points[i][1];
    z[i] = points[i][2];
    qr[i] = q[static_cast<Eigen::Index>(i)].real();
    qi[i] = q[static_cast<Eigen::Index>(i)].imag();
  }
  pair_kernel(x.data(), y.data(), z.data(), qr.data(), qi.data(), n, k, outr.data(), outi.data());
  Vector out(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) out[static_cast<Eigen::Index>(i)] = cplx(outr[i], outi[i]);
  return out;
}

ParticleCloud place_particles(const Medium& medium, double a, double kappa, const PlacementOptions& options) {
  if (!(a > 0.0)) throw ArgumentError("particle radius must be positive");
  if (!(kappa >= 0.0 && kappa < 1.0)) throw ArgumentError("kappa must lie in [0, 1)");
  if (!(options.jitter >= 0.0 && options.jitter < 1.0)) throw ArgumentError("jitter must lie in [0, 1)");
  ParticleCloud cloud;
  cloud.partition = CubePartition(medium.omega, options.b);
  cloud.a = a;
  cloud.kappa = kappa;
  cloud.c = medium.c;
  const int nc = cloud.partition.count();
  const double scale = std::pow(a, -(2.0 - kappa));

  cloud.cube_targets.resize(nc);
  cloud.cube_counts.resize(nc);
  double cumulative = 0.0;
  long long placed = 0;
  for (int q = 0; q < nc; ++q) {
    const double integral = integrate_box(medium.N, cloud.partition.cube(q));
    if (integral < 0.0) throw ArgumentError("density N must be non-negative");
    cloud.cube_targets[q] = scale * integral;
    cumulative += cloud.cube_targets[q];
    const long long upto = std::llround(cumulative);
    cloud.cube_counts[q] = static_cast<int>(upto - placed);
    placed = upto;
  }

  double d = std::numeric_limits<double>::infinity();
  for (int q = 0; q < nc; ++q)
    if (cloud.cube_counts[q] > 0) {
      const int m = static_cast<int>(std::ceil(std::cbrt(static_cast<double>(cloud.cube_counts[q])) - 1e-9));
      d = std::min(d, (1.0 - options.jitter) * options.b / m);
    }
  if (!std::isfinite(d)) d = options.b;
  if (d < 2.0 * a) throw InfeasibleDensityError("requested density forces particles closer than 2a");
  cloud.d = d;
  cloud.separation_ordering = a <= d / 10.0 && d <= options.b / 10.0;

  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int q = 0; q < nc; ++q) {
    const int count = cloud.cube_counts[q];
    if (count == 0) continue;
    const int m = static_cast<int>(std::ceil(std::cbrt(static_cast<double>(count)) - 1e-9));
    const double cell = options.b / m;
    std::mt19937_64 rng(options.seed * 1000003ULL + static_cast<std::uint64_t>(q));
    std::vector<int> slots(static_cast<std::size_t>(m) * m * m);
    std::iota(slots.begin(), slots.end(), 0);
    std::shuffle(slots.begin(), slots.end(), rng);
    slots.resize(static_cast<std::size_t>(count));
    std::sort(slots.begin(), slots.end());
    const Vec3 lo = cloud.partition.cube(q).lo;
    for (int s : slots) {
      const Vec3 idx(s % m, (s / m) % m, s / (m * m));
      Vec3 p = lo + (idx.array() + 0.5).matrix() * cell;
      for (int ax = 0; ax < 3; ++ax) p[ax] += options.jitter * 0.5 * cell * unif(rng);
      cloud.points.push_back(p);
      cloud.cube.push_back(q);
      const cplx hv = medium.h(p);
      if (hv.imag() > 1e-14 * std::max(1.0, std::abs(hv))) throw ArgumentError("impedance field needs Im h <= 0");
      cloud.h_values.push_back(hv);
      cloud.zeta.push_back(hv / std::pow(a, kappa));
    }
  }
  return cloud;
}

ManyBodyResult many_body_solve(const ParticleCloud& cloud, const IncidentWave& wave, const ManyBodyOptions& options) {
  const auto n = static_cast<Eigen::Index>(cloud.size());
  ManyBodyResult out;
  if (n == 0) {
    out.u = Vector::Zero(0);
    out.Q = Vector::Zero(0);
    return out;
  }
  const double strength = cloud.c * std::pow(cloud.a, 2.0 - cloud.kappa);
  Vector s(n);
  for (Eigen::Index i = 0; i < n; ++i) s[i] = strength * cloud.h_values[static_cast<std::size_t>(i)];
  const Vector u0 = incident(cloud.points, wave);
  const SystemSolve sol =
      solve_pair_system(cloud.points, s, Vector::Zero(n), wave.k, u0, options.dense_limit, options.tol, options.max_iter);
  out.u = sol.u;
  out.Q = -s.cwiseProduct(sol.u);
  out.dense = sol.dense;
  out.iterations = sol.iterations;
  out.residual = sol.residual;
  return out;
}

Vector cube_average(const CubePartition& partition, const std::vector<Vec3>& points, const Vector& values) {
  const int nc = partition.count();
  Vector sum = Vector::Zero(nc);
  std::vector<int> count(static_cast<std::size_t>(nc), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int q = partition.cube_of(points[i]);
    sum[q] += values[static_cast<Eigen::Index>(i)];
    ++count[static_cast<std::size_t>(q)];
  }
  for (int q = 0; q < nc; ++q)
    sum[q] = count[static_cast<std::size_t>(q)] ? sum[q] / static_cast<double>(count[static_cast<std::size_t>(q)])
                                                : cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
  return sum;
}

CubeReduction reduce_to_cubes(const ParticleCloud& cloud, const Medium& medium, const IncidentWave& wave,
                              const ManyBodyResult* las) {
  const CubePartition& part = cloud.partition;
  const int nc = part.count();
  CubeReduction out;
  Vector s(nc);
  const double back = std::pow(cloud.a, 2.0 - cloud.kappa);
  for (int q = 0; q < nc; ++q) {
    out.centers.push_back(part.center(q));
    s[q] = medium.c * medium.h(out.centers.back()) * cloud.cube_targets[static_cast<std::size_t>(q)] * back;
  }
  const Vector u0 = incident(out.centers, wave);
  out.u = solve_pair_system(out.centers, s, Vector::Zero(nc), wave.k, u0, 4096, 1e-12, 400).u;
  if (las) {
    out.las_average = cube_average(part, cloud.points, las->u);
    for (int q = 0; q < nc; ++q) {
      if (!std::isfinite(out.las_average[q].real())) continue;
      out.max_relative_deviation =
          std::max(out.max_relative_deviation, std::abs(out.u[q] - out.las_average[q]) / std::abs(out.las_average[q]));
    }
  }
  return out;
}

cplx self_cell_integral(double s, double k) {
  if (!(s > 0.0)) throw ArgumentError("cell side must be positive");
  // int_0^R r e^{ikr} dr
  auto radial = [k](double r) -> cplx {
    const double kr = k * r;
    if (kr < 1.0) {
      cplx sum = 0.0, term = r * r;  // (ik)^n r^{n+2} / n!
      for (int n = 0; n < 30; ++n) {
        sum += term / static_cast<double>(n + 2);
        term *= I * kr / static_cast<double>(n + 1);
      }
      return sum;
    }
    return std::exp(I * kr) * (1.0 / (k * k) - I * r / k) - 1.0 / (k * k);
  };
  RealVector x, w;
  quad::gauss_legendre(24, x, w);
  const double h = 0.5 * s;
  cplx face = 0.0;
  for (int i = 0; i < x.size(); ++i)
    for (int j = 0; j < x.size(); ++j) {
      const double px = h * x[i], py = h * x[j];
      const double r = std::sqrt(px * px + py * py + h * h);
      face += w[i] * w[j] * h * h * radial(r) * h / (r * r * r);
    }
  return 6.0 * face / (4.0 * pi);
}

EffectiveMediumResult effective_medium_solve(const Medium& medium, const IncidentWave& wave, int grid_n,
                                             const EffectiveMediumOptions& options) {
  if (grid_n < 1) throw ArgumentError("grid_n must be positive");
  const Vec3 len = medium.omega.size();
  const double cell = len[0] / grid_n;
  int dims[3];
  for (int a = 0; a < 3; ++a) {
    const double ratio = len[a] / cell;
    dims[a] = static_cast<int>(std::lround(ratio));
    if (dims[a] < 1 || std::abs(ratio - dims[a]) > 1e-9 * std::max(1.0, ratio))
      throw ArgumentError("medium box is not a whole number of cubic cells");
  }
  const long total = static_cast<long>(dims[0]) * dims[1] * dims[2];
  if (total > 32L * 32 * 32) throw ArgumentError("effective medium grid exceeds 32^3 cells");

  EffectiveMediumResult out;
  out.cell = cell;
  out.grid_n = grid_n;
  const double vol = cell * cell * cell;
  for (int k = 0; k < dims[2]; ++k)
    for (int j = 0; j < dims[1]; ++j)
      for (int i = 0; i < dims[0]; ++i)
        out.points.push_back(medium.omega.lo + cell * Vec3(i + 0.5, j + 0.5, k + 0.5));
  const auto n = static_cast<Eigen::Index>(out.points.size());
  const cplx self = self_cell_integral(cell, wave.k);
  Vector s(n), diag(n);
  out.n2.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec3& p = out.points[static_cast<std::size_t>(i)];
    const cplx chN = medium.c * medium.h(p) * medium.N(p);
    s[i] = chN * vol;
    diag[i] = chN * self;
    out.n2[i] = refraction(medium, p);
  }
  const Vector u0 = incident(out.points, wave);
  const SystemSolve sol =
      solve_pair_system(out.points, s, diag, wave.k, u0, options.dense_limit, options.tol, options.max_iter);
  out.u = sol.u;
  out.iterations = sol.iterations;
  return out;
}

double las_continuum_discrepancy(const ParticleCloud& cloud, const ManyBodyResult& las,
                                 const EffectiveMediumResult& continuum) {
  const Vector a = cube_average(cloud.partition, cloud.points, las.u);
  const Vector b = cube_average(cloud.partition, continuum.points, continuum.u);
  double worst = 0.0;
  for (Eigen::Index q = 0; q < a.size(); ++q) {
    if (!std::isfinite(a[q].real()) || !std::isfinite(b[q].real())) continue;
    worst = std::max(worst, std::abs(a[q] - b[q]) / std::abs(b[q]));
  }
  return worst;
}

}  // namespace iew::scattering
