#include "iew/linalg.hpp"

#include <cmath>
#include <vector>

#include "iew/errors.hpp"

namespace iew::linalg {

namespace {

void givens(cplx a, cplx b, cplx& c, cplx& s) {
  const double na = std::abs(a), nb = std::abs(b);
  if (nb == 0.0) {
    c = 1.0;
    s = 0.0;
    return;
  }
  if (na == 0.0) {
    c = 0.0;
    s = std::conj(b) / nb;
    return;
  }
  const double r = std::hypot(na, nb);
  c = na / r;
  s = (a / na) * std::conj(b) / r;
}

}  // namespace

GmresResult gmres(const MatVec& apply, const Vector& b, const Vector& x0, double tol, int max_iter,
                  int restart) {
  GmresResult out;
  out.x = x0.size() == b.size() ? x0 : Vector::Zero(b.size());
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    out.x.setZero();
    out.converged = true;
    return out;
  }
  const auto n = b.size();
  restart = std::max(1, std::min<int>(restart, static_cast<int>(n)));
  while (out.iterations < max_iter) {
    Vector r = b - apply(out.x);
    double beta = r.norm();
    out.relative_residual = beta / bnorm;
    if (out.relative_residual <= tol) {
      out.converged = true;
      return out;
    }
    Matrix v(n, restart + 1);
    Matrix h = Matrix::Zero(restart + 1, restart);
    std::vector<cplx> cs(restart), sn(restart);
    Vector g = Vector::Zero(restart + 1);
    g[0] = beta;
    v.col(0) = r / beta;
    int k = 0;
    for (; k < restart && out.iterations < max_iter; ++k) {
      ++out.iterations;
      Vector w = apply(v.col(k));
      for (int i = 0; i <= k; ++i) {
        h(i, k) = v.col(i).dot(w);
        w -= h(i, k) * v.col(i);
      }
      h(k + 1, k) = w.norm();
      if (std::abs(h(k + 1, k)) > 0.0) v.col(k + 1) = w / h(k + 1, k);
      for (int i = 0; i < k; ++i) {
        const cplx t = cs[i] * h(i, k) + sn[i] * h(i + 1, k);
        h(i + 1, k) = -std::conj(sn[i]) * h(i, k) + std::conj(cs[i]) * h(i + 1, k);
        h(i, k) = t;
      }
      givens(h(k, k), h(k + 1, k), cs[k], sn[k]);
      const cplx t = cs[k] * h(k, k) + sn[k] * h(k + 1, k);
      h(k + 1, k) = 0.0;
      h(k, k) = t;
      g[k + 1] = -std::conj(sn[k]) * g[k];
      g[k] = cs[k] * g[k];
      out.relative_residual = std::abs(g[k + 1]) / bnorm;
      if (out.relative_residual <= tol || std::abs(h(k, k)) == 0.0) {
        ++k;
        break;
      }
    }
    Vector y = h.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    out.x += v.leftCols(k) * y;
    if (out.relative_residual <= tol) {
      out.relative_residual = (b - apply(out.x)).norm() / bnorm;
      out.converged = out.relative_residual <= 10.0 * tol;
      if (out.converged) return out;
    }
  }
  out.relative_residual = (b - apply(out.x)).norm() / bnorm;
  out.converged = out.relative_residual <= tol;
  return out;
}

Vector dense_solve(const Matrix& a, const Vector& b, double rcond_floor) {
  Eigen::PartialPivLU<Matrix> lu(a);
  // the rcond estimate alone misses exact zero pivots, so check the pivots too
  const RealVector piv = lu.matrixLU().diagonal().cwiseAbs();
  const double pmax = piv.size() ? piv.maxCoeff() : 0.0;
  const double rc = std::min(lu.rcond(), pmax > 0.0 ? piv.minCoeff() / pmax : 0.0);
  if (!(rc > rcond_floor) || !std::isfinite(rc))
    throw SingularSystemError("dense system is numerically singular", rc > 0 ? 1.0 / rc : INFINITY);
  Vector x = lu.solve(b);
  if (!x.allFinite()) throw SingularSystemError("dense system is numerically singular", INFINITY);
  return x;
}

WeightedSvd weighted_svd(const Matrix& m, const RealVector& weights) {
  const RealVector s = weights.cwiseSqrt();
  const RealVector inv = s.cwiseInverse();
  const Matrix sym = s.asDiagonal() * m * inv.asDiagonal();
  Eigen::JacobiSVD<Matrix> svd(sym, Eigen::ComputeFullU | Eigen::ComputeFullV);
  WeightedSvd out;
  out.s = svd.singularValues();
  out.left = inv.asDiagonal() * svd.matrixU();
  out.right = inv.asDiagonal() * svd.matrixV();
  return out;
}

double loglog_slope(const RealVector& x, const RealVector& y) {
  if (x.size() != y.size() || x.size() < 2) throw ArgumentError("loglog_slope: need two or more points");
  const RealVector lx = x.array().log().matrix();
  const RealVector ly = y.array().log().matrix();
  const double mx = lx.mean(), my = ly.mean();
  const double sxy = ((lx.array() - mx) * (ly.array() - my)).sum();
  const double sxx = (lx.array() - mx).square().sum();
  return sxy / sxx;
}

}  // namespace iew::linalg
