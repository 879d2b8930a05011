#pragma once

#include "knnrex/errors.hpp"
#include "knnrex/types.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace knnrex {

//! Kernel construction set: m points (one per row) that implicitly define a
//! crossover kernel.
template <typename Scalar>
using Kcs = PointSet<Scalar>;

//! Maximum-likelihood Gaussian fitted to a KCS (1/m normalizer).
template <typename Scalar>
struct KcsStats {
  Vector<Scalar> mu;
  Matrix<Scalar> sigma;
};

template <typename Derived>
KcsStats<typename Derived::Scalar> kcs_stats(const Eigen::MatrixBase<Derived>& kcs) {
  using Scalar = typename Derived::Scalar;
  if (kcs.rows() == 0) throw Error(Errc::EmptyKcs, "kcs_stats: empty kernel construction set");
  KcsStats<Scalar> s;
  s.mu = kcs.colwise().mean().transpose();
  const Matrix<Scalar> centered = kcs.rowwise() - s.mu.transpose();
  s.sigma = (centered.transpose() * centered) / static_cast<Scalar>(kcs.rows());
  return s;
}

//! Reusable buffers for the sampling hot path.
template <typename Scalar>
struct RexScratch {
  Vector<Scalar> mu;
  std::vector<Scalar> eps;
};

//! REX crossover draw from the KCS made of rows `members` of `x`, written to
//! `out`: y = mu + sum_i eps_i (x_i - mu), eps_i ~ N(0, 1/m). Exactly m normal
//! variates are drawn, in member order, before any arithmetic. Never forms
//! the covariance, so the cost is O(m d).
template <typename Derived, typename Out>
void rex_sample_members(const Eigen::MatrixBase<Derived>& x, std::span<const Index> members,
                        Rng& rng, RexScratch<typename Derived::Scalar>& scratch, Out&& out) {
  using Scalar = typename Derived::Scalar;
  const auto m = static_cast<Index>(members.size());
  if (m == 0) throw Error(Errc::EmptyKcs, "rex_sample: empty kernel construction set");
  const Index d = x.cols();

  scratch.eps.resize(members.size());
  std::normal_distribution<Scalar> normal(Scalar(0), Scalar(1) / std::sqrt(static_cast<Scalar>(m)));
  for (auto& e : scratch.eps) e = normal(rng);

  scratch.mu.setZero(d);
  for (Index id : members) scratch.mu += x.row(id).transpose();
  scratch.mu /= static_cast<Scalar>(m);

  for (Index c = 0; c < d; ++c) {
    Scalar acc = 0;
    for (Index i = 0; i < m; ++i) {
      acc += scratch.eps[static_cast<std::size_t>(i)] * (x(members[static_cast<std::size_t>(i)], c) - scratch.mu(c));
    }
    out(c) = scratch.mu(c) + acc;
  }
}

//! One REX draw from a whole KCS (rows of `kcs`).
template <typename Derived>
Vector<typename Derived::Scalar> rex_sample(const Eigen::MatrixBase<Derived>& kcs, Rng& rng) {
  using Scalar = typename Derived::Scalar;
  std::vector<Index> members(static_cast<std::size_t>(kcs.rows()));
  for (std::size_t i = 0; i < members.size(); ++i) members[i] = static_cast<Index>(i);
  RexScratch<Scalar> scratch;
  Vector<Scalar> y(kcs.cols());
  rex_sample_members(kcs, members, rng, scratch, y);
  return y;
}

namespace detail {

template <typename Scalar>
bool chol_is_positive_definite(const Eigen::LLT<Matrix<Scalar>>& llt, const Matrix<Scalar>& a) {
  if (llt.info() != Eigen::Success) return false;
  const Scalar scale = a.diagonal().cwiseAbs().maxCoeff();
  if (!(scale > Scalar(0))) return false;
  const auto diag = llt.matrixLLT().diagonal();
  const Scalar floor = Scalar(1e-12) * scale;
  for (Index i = 0; i < diag.size(); ++i) {
    if (!(diag(i) * diag(i) > floor)) return false;
  }
  return true;
}

}  // namespace detail

//! Gaussian N(mu, sigma + ridge I) prepared for repeated density evaluation.
template <typename Scalar>
class GaussianDensity {
 public:
  //! Throws SingularSigma when sigma + ridge I is not numerically positive
  //! definite (pivot below 1e-12 of the largest diagonal entry).
  GaussianDensity(Vector<Scalar> mu, Matrix<Scalar> sigma, Scalar ridge = 0) : mu_(std::move(mu)) {
    const Index d = mu_.size();
    sigma.diagonal().array() += ridge;
    llt_.compute(sigma);
    if (!detail::chol_is_positive_definite(llt_, sigma)) {
      throw Error(Errc::SingularSigma, "kernel covariance is not positive definite");
    }
    const auto diag = llt_.matrixLLT().diagonal();
    const Scalar half_log_det = diag.array().log().sum();
    log_norm_ = -Scalar(0.5) * static_cast<Scalar>(d) * std::log(Scalar(2) * std::numbers::pi_v<Scalar>) -
                half_log_det;
  }

  template <typename Derived>
  Scalar log_density(const Eigen::MatrixBase<Derived>& y) const {
    const Vector<Scalar> z = llt_.matrixL().solve(y - mu_);
    return log_norm_ - Scalar(0.5) * z.squaredNorm();
  }

  template <typename Derived>
  Scalar density(const Eigen::MatrixBase<Derived>& y) const {
    return std::exp(log_density(y));
  }

  Index dims() const { return mu_.size(); }

 private:
  Vector<Scalar> mu_;
  Eigen::LLT<Matrix<Scalar>> llt_;
  Scalar log_norm_ = 0;
};

//! The density implied by REX sampling from `kcs`: N(y | mu, Sigma + ridge I).
template <typename YDerived, typename KDerived>
typename KDerived::Scalar rex_density(const Eigen::MatrixBase<YDerived>& y,
                                      const Eigen::MatrixBase<KDerived>& kcs,
                                      typename KDerived::Scalar ridge = 0) {
  using Scalar = typename KDerived::Scalar;
  if (y.size() != kcs.cols()) {
    throw Error(Errc::DimensionMismatch, "rex_density: point and KCS dimensions differ");
  }
  auto stats = kcs_stats(kcs);
  const GaussianDensity<Scalar> g(std::move(stats.mu), std::move(stats.sigma), ridge);
  return g.density(y);
}

//! center + h z, z standard normal; d variates drawn in coordinate order.
template <typename Derived, typename Out>
void gaussian_sample_into(const Eigen::MatrixBase<Derived>& center, typename Derived::Scalar h,
                          Rng& rng, Out&& out) {
  using Scalar = typename Derived::Scalar;
  std::normal_distribution<Scalar> normal(Scalar(0), Scalar(1));
  for (Index c = 0; c < center.size(); ++c) out(c) = center(c) + h * normal(rng);
}

template <typename Derived>
Vector<typename Derived::Scalar> gaussian_sample(const Eigen::MatrixBase<Derived>& center,
                                                 typename Derived::Scalar h, Rng& rng) {
  if (h < 0) throw Error(Errc::BadParams, "gaussian_sample: bandwidth must be non-negative");
  Vector<typename Derived::Scalar> y(center.size());
  gaussian_sample_into(center, h, rng, y);
  return y;
}

}  // namespace knnrex
