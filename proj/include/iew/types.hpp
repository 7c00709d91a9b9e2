#pragma once

#include <complex>
#include <functional>

#include <Eigen/Dense>

namespace iew {

using cplx = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using Vec3 = Eigen::Vector3d;

/// Scalar function of one real variable.
using RealFunction = std::function<double(double)>;
using ComplexFunction = std::function<cplx(double)>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr cplx I{0.0, 1.0};

}  // namespace iew
