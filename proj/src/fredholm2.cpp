#include "iew/fredholm2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "iew/errors.hpp"
#include "iew/linalg.hpp"

namespace iew::fredholm {

namespace {

// Relative size below which a projection on the adjoint null space is zero.
constexpr double solvability_tol = 1e-8;

double weighted_norm(const Vector& u, const RealVector& w) {
  return std::sqrt((w.array() * u.array().abs2()).sum());
}

cplx weighted_inner(const Vector& u, const Vector& v, const RealVector& w) {
  return (w.array().cast<cplx>() * u.array() * v.array().conjugate()).sum();
}

int numerical_rank(const RealVector& s, double tol) {
  if (s.size() == 0 || s[0] == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > tol * s[0]) ++r;
  return r;
}

}  // namespace

DegenerateResult solve_degenerate(const std::vector<ComplexFunction>& a_funcs,
                                  const std::vector<ComplexFunction>& b_funcs, cplx mu, const ComplexFunction& f,
                                  const QuadRule& rule) {
  if (a_funcs.empty() || a_funcs.size() != b_funcs.size())
    throw ArgumentError("solve_degenerate: need equally many a and b functions (at least one)");
  const auto m = static_cast<Eigen::Index>(a_funcs.size());
  const auto n = static_cast<Eigen::Index>(rule.size());
  const RealVector& w = rule.weights();

  Matrix a_s(n, m), b_s(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    a_s.col(j) = quad::sample(rule, a_funcs[j]);
    b_s.col(j) = quad::sample(rule, b_funcs[j]);
  }
  const Vector fs = quad::sample(rule, f);

  // a_pm = (a_m, b_p) and f_p = (f, b_p) without conjugation: the kernel is
  // sum a_m(x) b_m(t), so K u = sum a_m int b_m u.
  const Matrix bw = w.asDiagonal() * b_s;
  const Matrix a = bw.transpose() * a_s;
  const Vector fp = bw.transpose() * fs;

  DegenerateResult out;
  Eigen::ComplexEigenSolver<Matrix> es(a);
  std::vector<cplx> chars;
  const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < m; ++i) {
    const cplx ev = es.eigenvalues()[i];
    if (std::abs(ev) > 1e-12 * std::max(scale, 1e-300)) chars.push_back(1.0 / ev);
  }
  std::sort(chars.begin(), chars.end(), [](cplx x, cplx y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  out.characteristic_values = Eigen::Map<Vector>(chars.data(), static_cast<Eigen::Index>(chars.size()));

  const Matrix sys = Matrix::Identity(m, m) - mu * a;
  Eigen::JacobiSVD<Matrix> svd(sys, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector s = svd.singularValues();
  const int rank = numerical_rank(s, 1e-10);
  out.null_dim = static_cast<int>(m) - rank;
  const Matrix& u = svd.matrixU();
  const Vector ut_f = u.adjoint() * fp;
  Vector y = Vector::Zero(m);
  for (int i = 0; i < rank; ++i) y[i] = ut_f[i] / s[i];
  const Vector c = svd.matrixV() * y;
  const double fp_norm = std::max(1.0, fp.norm());
  for (Eigen::Index i = rank; i < m; ++i)
    if (std::abs(ut_f[i]) > solvability_tol * fp_norm) out.solvable = false;

  out.solution = mu * (a_s * c) + fs;
  return out;
}

std::pair<SolveReport, AlternativeReport> solve_second_kind(const DiscreteOperator& op, const SolveSpec& spec,
                                                            double tol) {
  const auto n = static_cast<Eigen::Index>(op.size());
  if (spec.rhs.size() != n) throw ArgumentError("solve_second_kind: rhs length does not match operator");
  if (!(tol > 0.0)) throw ArgumentError("solve_second_kind: tol must be positive");
  const RealVector& w = op.weights();
  const RealVector sw = w.cwiseSqrt();
  const RealVector isw = sw.cwiseInverse();

  const Matrix b = Matrix::Identity(n, n) - spec.mu * op.symmetrized();
  Eigen::JacobiSVD<Matrix> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector s = svd.singularValues();
  const int rank = numerical_rank(s, tol);
  const int nd = static_cast<int>(n) - rank;

  AlternativeReport alt;
  alt.singular_values = s;
  alt.null_dim = nd;
  alt.adjoint_null_dim = nd;
  alt.null_basis = isw.asDiagonal() * svd.matrixV().rightCols(nd);
  alt.adjoint_null_basis = isw.asDiagonal() * svd.matrixU().rightCols(nd);
  alt.general_solution_offsets = Vector::Zero(nd);

  const Vector ft = sw.cast<cplx>().asDiagonal() * spec.rhs;
  const Vector uh_f = svd.matrixU().adjoint() * ft;
  alt.adjoint_projections = uh_f.tail(nd);
  const double fnorm = ft.norm();
  for (int k = 0; k < nd; ++k)
    if (std::abs(alt.adjoint_projections[k]) > solvability_tol * std::max(fnorm, 1e-300)) alt.solvable = false;

  Vector y = Vector::Zero(n);
  for (int i = 0; i < rank; ++i) y[i] = uh_f[i] / s[i];
  SolveReport rep;
  rep.solution = isw.cast<cplx>().asDiagonal() * (svd.matrixV() * y);
  rep.solvable = alt.solvable;
  const Vector r = rep.solution - spec.mu * op.apply(rep.solution) - spec.rhs;
  const double fw = weighted_norm(spec.rhs, w);
  rep.residual = weighted_norm(r, w) / (fw > 0.0 ? fw : 1.0);
  return {std::move(rep), std::move(alt)};
}

RealVector EigenDecomposition::characteristic_values() const {
  RealVector out(eigenvalues.size());
  const double scale = eigenvalues.size() ? eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
    out[i] = std::abs(eigenvalues[i]) <= zero_tol * scale ? std::numeric_limits<double>::infinity()
                                                          : 1.0 / eigenvalues[i];
  return out;
}

EigenDecomposition eig_decompose(const DiscreteOperator& op) {
  const Matrix s = op.symmetrized();
  const double scale = std::max(s.cwiseAbs().maxCoeff(), 1e-300);
  if (s.imag().cwiseAbs().maxCoeff() > 1e-13 * scale)
    throw ContractViolation("eig_decompose: operator is not real");
  const RealMatrix re = s.real();
  if ((re - re.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ContractViolation("eig_decompose: operator is not selfadjoint");
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (re + re.transpose()));
  EigenDecomposition out;
  out.weights = op.weights();
  out.eigenvalues = es.eigenvalues().reverse();
  const RealVector isw = op.weights().cwiseSqrt().cwiseInverse();
  out.eigenvectors = (isw.asDiagonal() * es.eigenvectors().rowwise().reverse()).cast<cplx>();
  return out;
}

Vector solve_selfadjoint_spectral(const EigenDecomposition& decomp, const Vector& f, cplx lambda,
                                  double resonance_tol) {
  const auto n = decomp.eigenvalues.size();
  if (f.size() != n) throw ArgumentError("solve_selfadjoint_spectral: rhs length does not match decomposition");
  const RealVector& w = decomp.weights;
  const double scale = n ? decomp.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  const double fnorm = weighted_norm(f, w);
  Vector u = f;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double lj = decomp.eigenvalues[j];
    if (std::abs(lj) <= decomp.zero_tol * scale) continue;
    const Vector uj = decomp.eigenvectors.col(j);
    const cplx fj = weighted_inner(f, uj, w);
    // mu_j f_j / (mu_j - lambda) with mu_j = 1 / lambda_j, written without the division.
    const cplx denom = 1.0 - lambda * lj;
    if (std::abs(denom) <= resonance_tol * std::max(1.0, std::abs(lambda * lj))) {
      if (std::abs(fj) > 1e-10 * std::max(fnorm, 1e-300))
        throw ResonanceError("lambda coincides with a characteristic value", 1.0 / lj);
      u -= fj * uj;
      continue;
    }
    u += (fj / denom - fj) * uj;
  }
  return u;
}

double spectral_radius(const Matrix& m, int iters) {
  if (iters < 8) throw ArgumentError("spectral_radius: iters must be at least 8");
  const auto n = m.rows();
  if (n == 0) return 0.0;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = 1.0 + 0.3 * std::cos(1.7 * static_cast<double>(i));
  v.normalize();
  double estimate = 0.0;
  int stable = 0;
  for (int it = 0; it < iters; ++it) {
    const Vector w = m * v;
    const double nw = w.norm();
    if (nw == 0.0 || !std::isfinite(nw)) return 0.0;
    // Rayleigh-Ritz on span{v, Mv}.
    const cplx alpha = v.dot(w);
    Vector q1 = w - alpha * v;
    const double beta = q1.norm();
    double next;
    if (beta <= 1e-13 * nw) {
      next = std::abs(alpha);
    } else {
      q1 /= beta;
      const Vector mq1 = m * q1;
      Eigen::Matrix2cd h;
      h << alpha, v.dot(mq1), beta, q1.dot(mq1);
      Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(h, false);
      next = es.eigenvalues().cwiseAbs().maxCoeff();
    }
    if (std::abs(next - estimate) <= 1e-15 * std::max(next, 1e-300)) {
      if (++stable >= 3) return next;
    } else {
      stable = 0;
    }
    estimate = next;
    v = w / nw;
  }
  return estimate;
}

double spectral_radius(const DiscreteOperator& op, int iters) { return spectral_radius(op.matrix(), iters); }

std::string to_string(IterationVariant v) {
  switch (v) {
    case IterationVariant::plain:
      return "plain";
    case IterationVariant::resolvent:
      return "resolvent";
    case IterationVariant::symmetrized:
      return "symmetrized";
    case IterationVariant::normal:
      return "normal";
  }
  return "?";
}

IterationVariant parse_variant(const std::string& name) {
  if (name == "plain") return IterationVariant::plain;
  if (name == "resolvent") return IterationVariant::resolvent;
  if (name == "symmetrized") return IterationVariant::symmetrized;
  if (name == "normal") return IterationVariant::normal;
  throw ArgumentError("unknown iteration variant '" + name + "'");
}

IterativeReport solve_iterative(const DiscreteOperator& op, const SolveSpec& spec, IterationVariant variant,
                                const IterativeOptions& options) {
  const auto n = static_cast<Eigen::Index>(op.size());
  if (spec.rhs.size() != n) throw ArgumentError("solve_iterative: rhs length does not match operator");
  if (options.max_iter < 1) throw ArgumentError("solve_iterative: max_iter must be positive");
  const RealVector& w = op.weights();
  const Matrix& mm = op.matrix();
  const cplx lam = spec.lambda, mu = spec.mu;
  const Vector& f = spec.rhs;
  auto apply_b = [&](const Vector& u) -> Vector { return lam * u - mu * (mm * u); };
  // Adjoint of B in the weighted product: conj(lambda) u - conj(mu) D^{-1} M^H D u.
  const Matrix mh = w.cwiseInverse().asDiagonal() * mm.adjoint() * w.asDiagonal();
  auto apply_bstar = [&](const Vector& u) -> Vector { return std::conj(lam) * u - std::conj(mu) * (mh * u); };

  IterativeReport rep;
  rep.variant = variant;
  rep.solution = Vector::Zero(n);
  const double fnorm = weighted_norm(f, w);
  if (fnorm == 0.0) {
    rep.converged = true;
    return rep;
  }

  std::function<Vector(const Vector&)> step;
  switch (variant) {
    case IterationVariant::plain: {
      if (std::abs(lam - 1.0) > 1e-14) throw ArgumentError("plain iteration requires lambda = 1");
      rep.rho_estimate = std::abs(mu) * spectral_radius(op);
      step = [&](const Vector& u) -> Vector { return mu * (mm * u) + f; };
      break;
    }
    case IterationVariant::resolvent: {
      if (lam == 0.0) throw ArgumentError("resolvent iteration requires lambda != 0");
      rep.rho_estimate = std::abs(mu) * spectral_radius(op) / std::abs(lam);
      step = [&](const Vector& u) -> Vector { return (mu * (mm * u) + f) / lam; };
      break;
    }
    case IterationVariant::symmetrized: {
      if (std::abs(lam.imag()) > 1e-14 || std::abs(mu.imag()) > 1e-14)
        throw ContractViolation("symmetrized iteration needs real lambda and mu");
      if (options.bounds) {
        rep.m = options.bounds->first;
        rep.M = options.bounds->second;
      } else {
        const EigenDecomposition d = eig_decompose(op);
        const RealVector ev = (lam.real() - mu.real() * d.eigenvalues.array()).matrix();
        const double lo = ev.minCoeff(), hi = ev.maxCoeff();
        rep.m = lo - 0.01 * std::abs(lo);
        rep.M = hi + 0.01 * std::abs(hi);
      }
      if (!(rep.m > 0.0) || rep.M < rep.m)
        throw ContractViolation("symmetrized iteration needs a positive definite operator");
      rep.rho_estimate = (rep.M - rep.m) / (rep.M + rep.m);
      const double tau = 2.0 / (rep.m + rep.M);
      step = [&, tau](const Vector& u) -> Vector { return u - tau * (apply_b(u) - f); };
      break;
    }
    case IterationVariant::normal: {
      if (options.bounds) {
        rep.m = options.bounds->first;
        rep.M = options.bounds->second;
      } else {
        const Matrix bs = lam * Matrix::Identity(n, n) - mu * op.symmetrized();
        const RealVector s = Eigen::JacobiSVD<Matrix>(bs).singularValues();
        if (s[n - 1] <= 1e-14 * s[0]) throw ContractViolation("normal iteration needs a boundedly invertible operator");
        rep.m = 0.99 * s[n - 1] * s[n - 1];
        rep.M = 1.01 * s[0] * s[0];
      }
      if (!(rep.m > 0.0) || rep.M < rep.m) throw ContractViolation("normal iteration needs 0 < m <= M");
      rep.rho_estimate = (rep.M - rep.m) / (rep.M + rep.m);
      const double tau = 2.0 / (rep.m + rep.M);
      const Vector bf = apply_bstar(f);
      step = [&, tau, bf](const Vector& u) -> Vector { return u - tau * (apply_bstar(apply_b(u)) - bf); };
      break;
    }
  }

  for (int it = 1; it <= options.max_iter; ++it) {
    rep.solution = step(rep.solution);
    rep.iterations = it;
    const double r = weighted_norm(apply_b(rep.solution) - f, w) / fnorm;
    rep.residual_history.push_back(r);
    if (!std::isfinite(r) || r > 1e6) {
      rep.diverged = true;
      return rep;
    }
    if (r <= options.tol) {
      rep.converged = true;
      return rep;
    }
  }
  rep.diverged = rep.residual_history.back() > 1.0;
  return rep;
}

Matrix sample_basis(const QuadRule& rule, BasisFamily family, int n) {
  if (rule.kind() != quad::DomainKind::interval) throw ArgumentError("sample_basis: interval rules only");
  if (n < 1) throw ArgumentError("sample_basis: n must be positive");
  const auto m = static_cast<Eigen::Index>(rule.size());
  const double a = rule.lower(), b = rule.upper();
  Matrix v(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double x = rule.nodes()[i];
    if (family == BasisFamily::legendre) {
      const double t = (2.0 * x - a - b) / (b - a);
      double p0 = 1.0, p1 = t;
      for (int k = 0; k < n; ++k) {
        if (k == 0) {
          v(i, k) = 1.0;
        } else if (k == 1) {
          v(i, k) = t;
        } else {
          const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
          v(i, k) = p2;
        }
      }
    } else {
      const double s = 2.0 * pi * (x - a) / (b - a);
      for (int k = 0; k < n; ++k) {
        const int freq = (k + 1) / 2;
        v(i, k) = k == 0 ? 1.0 : (k % 2 ? std::cos(freq * s) : std::sin(freq * s));
      }
    }
  }
  return v;
}

ProjectionReport solve_projection(const DiscreteOperator& op, const SolveSpec& spec, BasisFamily family,
                                  const std::vector<int>& n_sequence) {
  if (n_sequence.empty()) throw ArgumentError("solve_projection: empty n sequence");
  auto [ref, alt] = solve_second_kind(op, spec);
  if (alt.null_dim != 0) throw ContractViolation("solve_projection: I - mu K has a nontrivial null space");

  const auto m = static_cast<Eigen::Index>(op.size());
  const RealVector& w = op.weights();
  const RealVector sw = w.cwiseSqrt();
  const Matrix b = Matrix::Identity(m, m) - spec.mu * op.symmetrized();
  const Vector ft = sw.cast<cplx>().asDiagonal() * spec.rhs;

  ProjectionReport out;
  out.reference = ref.solution;
  for (int n : n_sequence) {
    if (n < 1 || n > m) throw ArgumentError("solve_projection: basis size out of range");
    ProjectionStep st;
    st.n = n;
    const Matrix v = sw.cast<cplx>().asDiagonal() * sample_basis(op.rule(), family, n);
    Eigen::HouseholderQR<Matrix> qr(v);
    const Matrix q = qr.householderQ() * Matrix::Identity(m, n);
    const Matrix g = q.adjoint() * b * q;
    Eigen::PartialPivLU<Matrix> lu(g);
    if (!(lu.rcond() > 1e-13)) {
      st.singular = true;
      st.error_vs_finest = std::numeric_limits<double>::quiet_NaN();
      out.steps.push_back(std::move(st));
      continue;
    }
    const Vector c = lu.solve(q.adjoint() * ft);
    st.solution = sw.cwiseInverse().cast<cplx>().asDiagonal() * (q * c);
    st.error_vs_finest = weighted_norm(st.solution - ref.solution, w);
    out.steps.push_back(std::move(st));
  }
  std::vector<double> errs;
  for (const auto& s : out.steps)
    if (!s.singular) errs.push_back(s.error_vs_finest);
  const std::size_t first = errs.size() > 3 ? errs.size() - 3 : 0;
  out.tail_decreasing = errs.size() >= 2;
  for (std::size_t i = first + 1; i < errs.size(); ++i)
    if (!(errs[i] < errs[i - 1])) out.tail_decreasing = false;
  return out;
}

}  // namespace iew::fredholm
