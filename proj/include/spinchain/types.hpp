#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace spinchain {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Vec3 = Eigen::Vector3d;
using MatX = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
/// Input outside the documented domain of an operation.
struct DomainError : Error {
  using Error::Error;
};
/// Quadrature doubling or an iterative minimizer did not settle.
struct ConvergenceError : Error {
  using Error::Error;
};
/// Density matrix with an eigenvalue below the clipping floor.
struct PositivityError : Error {
  using Error::Error;
};
/// Requested size exceeds a hard resource guard.
struct ResourceError : Error {
  using Error::Error;
};
/// Flat quasi-energy band: no quasi-particle transport, no revival time.
struct NoTransportError : Error {
  using Error::Error;
};

namespace pauli {
inline Mat2 x() {
  Mat2 m;
  m << 0, 1, 1, 0;
  return m;
}
inline Mat2 y() {
  Mat2 m;
  m << 0, -kI, kI, 0;
  return m;
}
inline Mat2 z() {
  Mat2 m;
  m << 1, 0, 0, -1;
  return m;
}
inline Mat2 id() { return Mat2::Identity(); }
inline Mat2 dot(const Vec3& n) { return n(0) * x() + n(1) * y() + n(2) * z(); }
/// Index 0..3 -> I, x, y, z.
inline Mat2 by_index(int i) {
  switch (i) {
    case 1: return x();
    case 2: return y();
    case 3: return z();
    default: return id();
  }
}
}  // namespace pauli

}  // namespace spinchain
