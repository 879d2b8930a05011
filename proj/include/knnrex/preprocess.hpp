#pragma once

#include "knnrex/errors.hpp"
#include "knnrex/types.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace knnrex {

//! Affine map taking data to zero mean and identity covariance:
//! forward(x) = W (x - mean), inverse(y) = W^{-1} y + mean.
template <typename Scalar>
struct WhitenTransform {
  Vector<Scalar> mean;
  Matrix<Scalar> forward;
  Matrix<Scalar> inverse;

  Index dims() const { return mean.size(); }

  static WhitenTransform identity(Index d) {
    return {Vector<Scalar>::Zero(d), Matrix<Scalar>::Identity(d, d),
            Matrix<Scalar>::Identity(d, d)};
  }
};

//! Column means of a point set.
template <typename Derived>
Vector<typename Derived::Scalar> sample_mean(const Eigen::MatrixBase<Derived>& x) {
  return x.colwise().mean().transpose();
}

//! Covariance with the 1/n normalizer.
template <typename Derived>
Matrix<typename Derived::Scalar> sample_covariance(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Vector<Scalar> mu = sample_mean(x);
  const Matrix<Scalar> centered = x.rowwise() - mu.transpose();
  return (centered.transpose() * centered) / static_cast<Scalar>(x.rows());
}

//! Fits the whitening transform W = L^{-1/2} Q^T from the symmetric
//! eigendecomposition of the sample covariance. Eigenvector signs are fixed so
//! that the largest-magnitude entry of each is positive.
template <typename Derived>
WhitenTransform<typename Derived::Scalar> whiten_fit(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Index n = x.rows();
  const Index d = x.cols();
  if (d == 0 || n < d + 1) {
    throw Error(Errc::TooFewPoints, "whitening needs at least d+1 = " + std::to_string(d + 1) +
                                        " points, got " + std::to_string(n));
  }
  const Vector<Scalar> mu = sample_mean(x);
  const Matrix<Scalar> cov = sample_covariance(x);

  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eig(cov);
  if (eig.info() != Eigen::Success) {
    throw Error(Errc::SingularCovariance, "eigendecomposition of the covariance failed");
  }
  const Vector<Scalar>& lambda = eig.eigenvalues();  // ascending
  const Scalar largest = lambda(d - 1);
  if (!(largest > Scalar(0)) || !(lambda(0) > Scalar(1e-12) * largest)) {
    throw Error(Errc::SingularCovariance,
                "sample covariance is singular (constant or collinear columns)");
  }
  Matrix<Scalar> q = eig.eigenvectors();
  for (Index j = 0; j < d; ++j) {
    Index arg = 0;
    q.col(j).cwiseAbs().maxCoeff(&arg);
    if (q(arg, j) < Scalar(0)) q.col(j) = -q.col(j);
  }
  const Vector<Scalar> root = lambda.cwiseSqrt();
  WhitenTransform<Scalar> t;
  t.mean = mu;
  t.forward = root.cwiseInverse().asDiagonal() * q.transpose();
  t.inverse = q * root.asDiagonal();
  return t;
}

template <typename Scalar, typename Derived>
PointSet<Scalar> whiten_apply(const WhitenTransform<Scalar>& t, const Eigen::MatrixBase<Derived>& x) {
  if (x.cols() != t.dims()) {
    throw Error(Errc::DimensionMismatch, "whiten_apply: data has " + std::to_string(x.cols()) +
                                             " columns, transform expects " +
                                             std::to_string(t.dims()));
  }
  return (x.rowwise() - t.mean.transpose()) * t.forward.transpose();
}

template <typename Scalar, typename Derived>
PointSet<Scalar> whiten_invert(const WhitenTransform<Scalar>& t, const Eigen::MatrixBase<Derived>& y) {
  if (y.cols() != t.dims()) {
    throw Error(Errc::DimensionMismatch, "whiten_invert: data has " + std::to_string(y.cols()) +
                                             " columns, transform expects " +
                                             std::to_string(t.dims()));
  }
  PointSet<Scalar> x = y * t.inverse.transpose();
  x.rowwise() += t.mean.transpose();
  return x;
}

//! Single-point forward map.
template <typename Scalar, typename Derived>
Vector<Scalar> whiten_point(const WhitenTransform<Scalar>& t, const Eigen::MatrixBase<Derived>& x) {
  return t.forward * (x - t.mean);
}

//! Single-point inverse map.
template <typename Scalar, typename Derived>
Vector<Scalar> unwhiten_point(const WhitenTransform<Scalar>& t, const Eigen::MatrixBase<Derived>& y) {
  return t.inverse * y + t.mean;
}

}  // namespace knnrex
