#include <doctest.h>

#include <cmath>

#include "iew/errors.hpp"
#include "iew/many_body.hpp"

using namespace iew;
using namespace iew::scattering;

namespace {

Medium unit_medium(cplx h, double n = 1.0) {
  Medium m;
  m.N = [n](const Vec3&) { return n; };
  m.h = [h](const Vec3&) { return h; };
  return m;
}

ParticleCloud hand_cloud(std::vector<Vec3> pts, cplx h, double a) {
  ParticleCloud c;
  c.points = std::move(pts);
  c.h_values.assign(c.points.size(), h);
  c.zeta = c.h_values;
  c.cube.assign(c.points.size(), 0);
  c.a = a;
  return c;
}

double min_distance(const std::vector<Vec3>& p) {
  double d = INFINITY;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j) d = std::min(d, (p[i] - p[j]).norm());
  return d;
}

}  // namespace

TEST_CASE("refraction coefficient") {
  CHECK(refraction(unit_medium(0.0), Vec3::Zero()) == cplx(1.0));
  CHECK(std::abs(refraction(unit_medium(1.0 / (4.0 * pi)), Vec3::Zero())) < 1e-15);
  CHECK(std::abs(refraction(unit_medium(cplx(0.0, -1.0 / (4.0 * pi))), Vec3::Zero()) - cplx(1.0, 1.0)) < 1e-15);
}

TEST_CASE("cube partition") {
  const CubePartition p(Box{}, 0.25);
  CHECK(p.count() == 64);
  CHECK(p.cube_of(Vec3(0.1, 0.1, 0.1)) == 0);
  for (int q = 0; q < p.count(); ++q) CHECK(p.cube_of(p.center(q)) == q);
  CHECK_THROWS_AS(CubePartition(Box{}, 0.3), ArgumentError);
}

TEST_CASE("particle counts") {
  CHECK(place_particles(unit_medium(1.0, 0.0), 0.01, 0.0).size() == 0);
  const auto c1 = place_particles(unit_medium(1.0), 0.01, 0.0);
  CHECK(c1.size() == 10000);
  const auto c2 = place_particles(unit_medium(1.0), 0.005, 0.0);
  CHECK(c2.size() == 40000);
  int total = 0;
  for (int n : c1.cube_counts) total += n;
  CHECK(total == 10000);
  for (std::size_t i = 0; i < c1.size(); ++i) CHECK(c1.partition.cube_of(c1.points[i]) == c1.cube[i]);
  CHECK(c1.separation_ordering == (c1.a <= c1.d / 10 && c1.d <= c1.partition.b / 10));
}

TEST_CASE("placement is seeded and keeps its spacing") {
  PlacementOptions opt;
  opt.seed = 5;
  const auto a = place_particles(unit_medium(1.0), 0.02, 0.0, opt);
  const auto b = place_particles(unit_medium(1.0), 0.02, 0.0, opt);
  opt.seed = 6;
  const auto c = place_particles(unit_medium(1.0), 0.02, 0.0, opt);
  REQUIRE(a.size() == b.size());
  bool same = true, differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    same = same && a.points[i] == b.points[i];
    differs = differs || (i < c.size() && a.points[i] != c.points[i]);
  }
  CHECK(same);
  CHECK(differs);
  CHECK(min_distance(a.points) >= a.d * (1.0 - 1e-12));
  CHECK(a.d >= 2.0 * a.a);
}

TEST_CASE("placement errors") {
  CHECK_THROWS_AS(place_particles(unit_medium(1.0, 100.0), 0.01, 0.0), InfeasibleDensityError);
  CHECK_THROWS_AS(place_particles(unit_medium(cplx(0.0, 0.1)), 0.02, 0.0), ArgumentError);
  CHECK_THROWS_AS(place_particles(unit_medium(1.0), 0.02, 1.0), ArgumentError);
}

TEST_CASE("trivial many-body systems") {
  const IncidentWave wave(1.0, Vec3::UnitZ());
  const Vec3 x(0.3, 0.4, 0.5);
  const auto one = many_body_solve(hand_cloud({x}, 1.0, 0.01), wave);
  CHECK(std::abs(one.u[0] - wave(x)) < 1e-15);

  const auto cloud = place_particles(unit_medium(0.0), 0.025, 0.0);
  const auto free = many_body_solve(cloud, wave);
  for (std::size_t i = 0; i < cloud.size(); ++i) CHECK(std::abs(free.u[static_cast<Eigen::Index>(i)] - wave(cloud.points[i])) < 1e-14);
}

TEST_CASE("mirror pair") {
  const IncidentWave wave(1.0, Vec3::UnitZ());
  const auto r = many_body_solve(hand_cloud({Vec3(-0.1, 0.0, 0.5), Vec3(0.1, 0.0, 0.5)}, 1.0 / (4.0 * pi), 0.05), wave);
  CHECK(std::abs(r.u[0] - r.u[1]) <= 1e-12);
  CHECK(std::abs(r.u[0] - wave(Vec3(0, 0, 0.5))) > 1e-6);
}

TEST_CASE("interaction matrix and pair sums") {
  const auto cloud = place_particles(unit_medium(1.0), 0.025, 0.0);
  const Matrix g = interaction_matrix(cloud.points, 1.3);
  CHECK((g - g.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(g.diagonal().cwiseAbs().maxCoeff() == 0.0);
  Vector q = Vector::NullaryExpr(g.rows(), [](Eigen::Index i) { return cplx(std::sin(0.1 * i), std::cos(0.3 * i)); });
  CHECK((pair_sum(cloud.points, q, 1.3) - g * q).cwiseAbs().maxCoeff() <= 1e-12 * (g * q).cwiseAbs().maxCoeff());
}

TEST_CASE("iterative and dense solves agree") {
  const IncidentWave wave(1.0, Vec3(1, 0, 0));
  const auto cloud = place_particles(unit_medium(cplx(1.0 / (4.0 * pi), -0.02)), 0.025, 0.0);
  ManyBodyOptions dense, iterative;
  dense.dense_limit = 100000;
  iterative.dense_limit = 0;
  const auto a = many_body_solve(cloud, wave, dense);
  const auto b = many_body_solve(cloud, wave, iterative);
  CHECK(a.dense);
  CHECK_FALSE(b.dense);
  CHECK((a.u - b.u).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(b.residual <= 1e-9);
  const double strength = cloud.c * cloud.a * cloud.a;
  for (Eigen::Index i = 0; i < a.u.size(); ++i)
    CHECK(std::abs(a.Q[i] + strength * cloud.h_values[static_cast<std::size_t>(i)] * a.u[i]) < 1e-15);
}

TEST_CASE("absorbing clouds stay bounded") {
  const IncidentWave wave;
  const auto cloud = place_particles(unit_medium(cplx(1.0 / (4.0 * pi), -1.0 / (4.0 * pi))), 0.02, 0.0);
  const auto r = many_body_solve(cloud, wave);
  CHECK(r.u.cwiseAbs().maxCoeff() <= 10.0);
}

TEST_CASE("cube reduction in trivial settings") {
  const IncidentWave wave(1.0, Vec3(0, 1, 0));
  Medium m = unit_medium(1.0 / (4.0 * pi));
  m.omega.hi = Vec3::Constant(0.25);
  const auto single = place_particles(m, 0.02, 0.0);
  const auto r = reduce_to_cubes(single, m, wave);
  REQUIRE(r.u.size() == 1);
  CHECK(std::abs(r.u[0] - wave(Vec3::Constant(0.125))) < 1e-15);

  const Medium empty = unit_medium(1.0, 0.0);
  const auto cloud = place_particles(empty, 0.02, 0.0);
  const auto r0 = reduce_to_cubes(cloud, empty, wave);
  for (int q = 0; q < cloud.partition.count(); ++q) CHECK(std::abs(r0.u[q] - wave(cloud.partition.center(q))) < 1e-15);
}

TEST_CASE("cube reduction follows the particle system") {
  const IncidentWave wave;
  const Medium m = unit_medium(1.0 / (4.0 * pi));
  const auto cloud = place_particles(m, 0.02, 0.0);
  const auto las = many_body_solve(cloud, wave);
  const auto r = reduce_to_cubes(cloud, m, wave, &las);
  CHECK(r.max_relative_deviation <= 0.1);
  CHECK(r.las_average.size() == 64);
}

TEST_CASE("self-cell integral") {
  CHECK(self_cell_integral(1.0, 0.0).real() == doctest::Approx(0.189401).epsilon(1e-5));
  CHECK(self_cell_integral(2.0, 0.0).real() == doctest::Approx(4.0 * 0.189401).epsilon(1e-5));
  const cplx small = self_cell_integral(1.0, 0.01);
  CHECK(small.imag() == doctest::Approx(0.01 / (4.0 * pi)).epsilon(1e-4));
  CHECK_THROWS_AS(self_cell_integral(0.0, 1.0), ArgumentError);
}

TEST_CASE("effective medium") {
  const IncidentWave wave;
  const auto free = effective_medium_solve(unit_medium(0.0), wave, 6);
  CHECK(free.points.size() == 216);
  for (std::size_t i = 0; i < free.points.size(); ++i) {
    CHECK(std::abs(free.u[static_cast<Eigen::Index>(i)] - wave(free.points[i])) < 1e-15);
    CHECK(free.n2[static_cast<Eigen::Index>(i)] == cplx(1.0));
  }
  const auto flat = effective_medium_solve(unit_medium(1.0 / (4.0 * pi)), wave, 6);
  CHECK(flat.n2.cwiseAbs().maxCoeff() < 1e-15);
  CHECK((flat.u - free.u).cwiseAbs().maxCoeff() > 1e-3);
  CHECK_THROWS_AS(effective_medium_solve(unit_medium(1.0), wave, 33), ArgumentError);

  // refinement changes the field little
  const auto coarse = effective_medium_solve(unit_medium(1.0 / (4.0 * pi)), wave, 4);
  const auto fine = effective_medium_solve(unit_medium(1.0 / (4.0 * pi)), wave, 8);
  const CubePartition part(Box{}, 0.25);
  const Vector ca = cube_average(part, coarse.points, coarse.u);
  const Vector fa = cube_average(part, fine.points, fine.u);
  CHECK((ca - fa).cwiseAbs().maxCoeff() <= 0.05);
}
