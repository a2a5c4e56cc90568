#pragma once

// Dense matrix exponential by scaling and squaring with diagonal Pade
// approximants (degrees 3, 5, 7, 9, 13), following Higham's 2005 algorithm.

#include "reachdec/error.hpp"

#include <Eigen/Dense>
#include <Eigen/LU>

#include <array>
#include <cmath>

namespace reachdec {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

namespace detail {

template <typename Scalar>
MatrixX<Scalar> pade_low(const MatrixX<Scalar>& a, const Scalar* b, int degree) {
  const auto n = a.rows();
  const MatrixX<Scalar> id = MatrixX<Scalar>::Identity(n, n);
  const MatrixX<Scalar> a2 = a * a;
  MatrixX<Scalar> power = id;
  MatrixX<Scalar> u = b[1] * id;
  MatrixX<Scalar> v = b[0] * id;
  for (int k = 2; k <= degree; k += 2) {
    power = power * a2;
    u += b[k + 1] * power;
    v += b[k] * power;
  }
  u = a * u;
  return (v - u).partialPivLu().solve(v + u);
}

template <typename Scalar>
MatrixX<Scalar> pade13(const MatrixX<Scalar>& a) {
  static constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
      129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
      1323241920.0,        40840800.0,          960960.0,           16380.0,
      182.0,               1.0};
  const auto n = a.rows();
  const MatrixX<Scalar> id = MatrixX<Scalar>::Identity(n, n);
  const MatrixX<Scalar> a2 = a * a;
  const MatrixX<Scalar> a4 = a2 * a2;
  const MatrixX<Scalar> a6 = a4 * a2;
  const MatrixX<Scalar> u_inner = a6 * (Scalar(b[13]) * a6 + Scalar(b[11]) * a4 + Scalar(b[9]) * a2) +
                                  Scalar(b[7]) * a6 + Scalar(b[5]) * a4 + Scalar(b[3]) * a2 +
                                  Scalar(b[1]) * id;
  const MatrixX<Scalar> u = a * u_inner;
  const MatrixX<Scalar> v = a6 * (Scalar(b[12]) * a6 + Scalar(b[10]) * a4 + Scalar(b[8]) * a2) +
                            Scalar(b[6]) * a6 + Scalar(b[4]) * a4 + Scalar(b[2]) * a2 + Scalar(b[0]) * id;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace detail

/// e^A for a square dense matrix.
template <typename Derived>
MatrixX<typename Derived::Scalar> expm(const Eigen::MatrixBase<Derived>& a_in) {
  using Scalar = typename Derived::Scalar;
  MatrixX<Scalar> a = a_in;
  if (a.rows() != a.cols()) throw Error("linalg", "dimension", "expm: matrix is not square");
  if (!a.allFinite()) throw Error("linalg", "nonfinite", "expm: matrix has non-finite entries");
  const auto n = a.rows();
  if (n == 0) return a;

  const Scalar norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  static constexpr std::array<double, 4> theta = {1.495585217958292e-2, 2.539398330063230e-1,
                                                  9.504178996162932e-1, 2.097847961257068e0};
  static constexpr std::array<double, 4> b3 = {120.0, 60.0, 12.0, 1.0};
  static constexpr std::array<double, 6> b5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
  static constexpr std::array<double, 8> b7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                               25200.0,    1512.0,    56.0,      1.0};
  static constexpr std::array<double, 10> b9 = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                                                30270240.0,    2162160.0,    110880.0,     3960.0,
                                                90.0,          1.0};
  if (norm1 <= theta[0]) return detail::pade_low<Scalar>(a, b3.data(), 2);
  if (norm1 <= theta[1]) return detail::pade_low<Scalar>(a, b5.data(), 4);
  if (norm1 <= theta[2]) return detail::pade_low<Scalar>(a, b7.data(), 6);
  if (norm1 <= theta[3]) return detail::pade_low<Scalar>(a, b9.data(), 8);

  constexpr double theta13 = 5.371920351148152;
  int squarings = 0;
  if (norm1 > theta13) squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  a /= std::ldexp(Scalar(1), squarings);
  MatrixX<Scalar> r = detail::pade13<Scalar>(a);
  for (int i = 0; i < squarings; ++i) r = r * r;
  if (!r.allFinite()) throw Error("linalg", "nonfinite", "expm: result overflowed");
  return r;
}

/// Phi = e^{A delta}, Phi1 = sum delta^{i+1}/(i+1)! A^i, Phi2 = sum delta^{i+2}/(i+2)! A^i.
template <typename Scalar>
struct IntegralMatrices {
  MatrixX<Scalar> phi;
  MatrixX<Scalar> phi1;
  MatrixX<Scalar> phi2;
};

/// All three matrices from one exponential of the block-triangular matrix
/// [[A, I, 0], [0, 0, I], [0, 0, 0]] * delta, read off its top block row.
template <typename Derived>
IntegralMatrices<typename Derived::Scalar> integral_matrices(const Eigen::MatrixBase<Derived>& a,
                                                             typename Derived::Scalar delta) {
  using Scalar = typename Derived::Scalar;
  const auto n = a.rows();
  if (a.rows() != a.cols()) throw Error("linalg", "dimension", "integral_matrices: matrix is not square");
  MatrixX<Scalar> aug = MatrixX<Scalar>::Zero(3 * n, 3 * n);
  aug.block(0, 0, n, n) = a * delta;
  aug.block(0, n, n, n).setIdentity();
  aug.block(n, 2 * n, n, n).setIdentity();
  aug.block(0, n, n, n) *= delta;
  aug.block(n, 2 * n, n, n) *= delta;
  const MatrixX<Scalar> e = expm(aug);
  return {e.block(0, 0, n, n), e.block(0, n, n, n), e.block(0, 2 * n, n, n)};
}

}  // namespace reachdec
