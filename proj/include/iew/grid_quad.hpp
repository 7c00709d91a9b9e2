#pragma once

// Quadrature rules on intervals, the unit circle and sphere surfaces, the
// kernel catalog, and Nystrom assembly of integral operators.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "iew/errors.hpp"
#include "iew/types.hpp"

namespace iew::quad {

enum class DomainKind { interval, circle, sphere };
enum class IntervalKind { trapezoid, gauss_legendre };

/// Nodes and positive weights on one of the supported domains. For intervals
/// and the circle the abscissae live in nodes() (angles for the circle); for
/// spheres the surface points and outward normals live in points()/normals().
class QuadRule {
 public:
  DomainKind kind() const { return kind_; }
  std::size_t size() const { return static_cast<std::size_t>(weights_.size()); }

  const RealVector& nodes() const { return nodes_; }
  const RealVector& weights() const { return weights_; }
  const std::vector<Vec3>& points() const { return points_; }
  const std::vector<Vec3>& normals() const { return normals_; }

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  double radius() const { return radius_; }
  const Vec3& center() const { return center_; }

  /// b - a, 2 pi, or 4 pi r^2.
  double measure() const;

  /// Node i as a point in R^3 (1D abscissae are embedded on the x axis).
  Vec3 point(std::size_t i) const;

  template <class F>
  auto integrate(F&& f) const {
    using R = decltype(f(point(0)));
    R sum{};
    for (std::size_t i = 0; i < size(); ++i) sum += weights_[i] * f(point(i));
    return sum;
  }

  /// Sum of weights times samples.
  cplx integrate_samples(const Vector& samples) const;

  friend QuadRule build_interval_rule(IntervalKind kind, int n, double a, double b);
  friend QuadRule build_circle_rule(int n);
  friend QuadRule build_sphere_rule(int n_theta, int n_phi, double radius, const Vec3& center);

 private:
  QuadRule() = default;

  DomainKind kind_ = DomainKind::interval;
  RealVector nodes_;
  RealVector weights_;
  std::vector<Vec3> points_;
  std::vector<Vec3> normals_;
  double lower_ = 0.0;
  double upper_ = 0.0;
  double radius_ = 0.0;
  Vec3 center_ = Vec3::Zero();
};

QuadRule build_interval_rule(IntervalKind kind, int n, double a, double b);

/// Equispaced angles 2 pi j / n with weights 2 pi / n; n even and >= 4.
QuadRule build_circle_rule(int n);

/// Gauss-Legendre in cos(theta) times uniform phi.
QuadRule build_sphere_rule(int n_theta, int n_phi, double radius, const Vec3& center = Vec3::Zero());

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(int n, RealVector& nodes, RealVector& weights);

/// Radius of the flat disk with the same area as a quadrature patch.
double equivalent_disk_radius(double patch_area);

/// A named bivariate kernel K(x, y), possibly complex valued.
class Kernel {
 public:
  using Evaluator = std::function<cplx(const Vec3&, const Vec3&)>;

  static Kernel constant(cplx c);
  /// sin(x - y)
  static Kernel sin_diff();
  /// exp(-|x - y|)
  static Kernel exp_abs();
  /// exp(ik|x - y|) / (4 pi |x - y|)
  static Kernel helmholtz_g(double k);
  /// 1 / (4 pi |x - y|)
  static Kernel laplace_g();
  /// Bilinear interpolation of samples values(i, j) = K(xs[i], ys[j]).
  static Kernel tabulated(RealVector xs, RealVector ys, Matrix values);
  /// Arbitrary kernel given by a callback on the real line.
  static Kernel custom(std::string name, std::function<cplx(double, double)> f, bool symmetric);
  /// Builds a catalog entry by name; parameters as documented per entry.
  static Kernel from_catalog(const std::string& name, const std::map<std::string, double>& params);

  const std::string& name() const { return name_; }
  const std::map<std::string, double>& parameters() const { return params_; }
  bool symmetric() const { return symmetric_; }
  bool weakly_singular() const { return weakly_singular_; }
  double wavenumber() const { return wavenumber_; }

  cplx operator()(const Vec3& x, const Vec3& y) const { return eval_(x, y); }
  cplx operator()(double x, double y) const { return eval_(Vec3(x, 0, 0), Vec3(y, 0, 0)); }

 private:
  Kernel(std::string name, Evaluator eval, bool symmetric, bool weakly_singular)
      : name_(std::move(name)), eval_(std::move(eval)), symmetric_(symmetric),
        weakly_singular_(weakly_singular) {}

  std::string name_;
  std::map<std::string, double> params_;
  Evaluator eval_;
  bool symmetric_;
  bool weakly_singular_;
  double wavenumber_ = 0.0;
};

/// Nystrom matrix M[i][j] = K(x_i, x_j) w_j over a fixed rule.
class DiscreteOperator {
 public:
  DiscreteOperator(QuadRule rule, Matrix matrix, bool symmetric_kernel);

  const QuadRule& rule() const { return rule_; }
  const Matrix& matrix() const { return matrix_; }
  bool symmetric_kernel() const { return symmetric_; }
  std::size_t size() const { return rule_.size(); }
  const RealVector& weights() const { return rule_.weights(); }

  Vector apply(const Vector& u) const { return matrix_ * u; }

  /// D^{1/2} M D^{-1/2}: the operator expressed in an orthonormal basis of
  /// the weighted inner product.
  Matrix symmetrized() const;

  /// Weighted inner product sum_i w_i u_i conj(v_i).
  cplx inner(const Vector& u, const Vector& v) const;
  double norm(const Vector& u) const;

 private:
  QuadRule rule_;
  Matrix matrix_;
  bool symmetric_;
};

/// Assembles the Nystrom operator. Weakly singular kernels (laplace_g,
/// helmholtz_g) are only accepted on sphere rules with the self-patch
/// correction enabled; the diagonal then carries the equivalent-disk integral.
DiscreteOperator assemble_nystrom(const Kernel& kernel, const QuadRule& rule, bool singular_correction = false);

/// Samples f at the rule nodes.
Vector sample(const QuadRule& rule, const std::function<cplx(double)>& f);

}  // namespace iew::quad
