#pragma once

// Moore-Penrose zero-forcing coders for a single user. Scalar-generic so the
// same code serves std::complex<float> and std::complex<double> channels.

#include <Eigen/Dense>
#include <cmath>
#include <limits>

namespace ychan {

template <typename Scalar>
using DynMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Condition number of a Hermitian positive-definite matrix
/// (ratio of extreme eigenvalues). Infinite if it is not positive definite.
template <typename Derived>
typename Derived::RealScalar hpd_condition_number(
    const Eigen::MatrixBase<Derived>& a) {
  using Real = typename Derived::RealScalar;
  using Plain = typename Derived::PlainObject;
  Eigen::SelfAdjointEigenSolver<Plain> eig(a.eval(), Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  if (eig.info() != Eigen::Success || ev.minCoeff() <= Real(0)) {
    return std::numeric_limits<Real>::infinity();
  }
  return ev.maxCoeff() / ev.minCoeff();
}

template <typename Scalar>
struct ZfPrecoder {
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  DynMatrix<Scalar> matrix;  // M x N, = alpha * H^H (H H^H)^{-1}
  Real alpha{};
  Real gram_condition{};
};

/// Right pseudo-inverse of an N x M uplink (N <= M), scaled so that a
/// white input of per-slot variance P/N yields transmit power exactly P:
/// alpha = sqrt(N / tr((H H^H)^{-1})).
template <typename Derived>
ZfPrecoder<typename Derived::Scalar> zf_precoder(
    const Eigen::MatrixBase<Derived>& h) {
  using Scalar = typename Derived::Scalar;
  const DynMatrix<Scalar> gram = h * h.adjoint();
  const DynMatrix<Scalar> gram_inv =
      gram.ldlt().solve(DynMatrix<Scalar>::Identity(gram.rows(), gram.cols()));
  ZfPrecoder<Scalar> out;
  out.gram_condition = hpd_condition_number(gram);
  out.alpha = std::sqrt(static_cast<typename ZfPrecoder<Scalar>::Real>(h.rows()) /
                        std::real(gram_inv.trace()));
  out.matrix = out.alpha * (h.adjoint() * gram_inv);
  return out;
}

template <typename Scalar>
struct ZfPostcoder {
  DynMatrix<Scalar> matrix;  // N x M, = (D^H D)^{-1} D^H
  typename Eigen::NumTraits<Scalar>::Real gram_condition{};
};

/// Left pseudo-inverse of an M x N downlink (N <= M).
template <typename Derived>
ZfPostcoder<typename Derived::Scalar> zf_postcoder(
    const Eigen::MatrixBase<Derived>& d) {
  using Scalar = typename Derived::Scalar;
  const DynMatrix<Scalar> gram = d.adjoint() * d;
  ZfPostcoder<Scalar> out;
  out.gram_condition = hpd_condition_number(gram);
  out.matrix = gram.ldlt().solve(d.adjoint());
  return out;
}

}  // namespace ychan
