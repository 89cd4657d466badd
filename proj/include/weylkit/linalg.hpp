#pragma once

#include "weylkit/hermite.hpp"

namespace weylkit {

/// Kronecker product, (A kron B)(i*p + k, j*q + l) = A(i, j) B(k, l).
inline CMatrix kron(const CMatrix& A, const CMatrix& B) {
  CMatrix out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

/// ||A - B||_F / ||B||_F, or ||A||_F when B vanishes.
inline double relative_error(const CMatrix& A, const CMatrix& B) {
  const double nb = B.norm();
  return nb > 0.0 ? (A - B).norm() / nb : A.norm();
}

}  // namespace weylkit
