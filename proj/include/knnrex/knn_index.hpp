#pragma once

#include "knnrex/errors.hpp"
#include "knnrex/parallel.hpp"
#include "knnrex/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace knnrex {

//! Exact k-nearest neighbors of every point of a sample, self excluded.
//! Row i of `ids` lists the neighbors of point i by ascending distance (ties
//! by lower index); row i of `dists` holds the matching Euclidean distances.
template <typename Scalar>
struct KnnIndex {
  Index k = 0;
  Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> ids;
  PointSet<Scalar> dists;

  Index size() const { return ids.rows(); }
};

//! Neighbor list returned by a single query.
template <typename Scalar>
struct Neighbors {
  std::vector<Index> ids;
  std::vector<Scalar> dists;
};

namespace detail {

// Selects the k smallest (squared distance, index) pairs in order. Ties are
// resolved by the index because pairs compare lexicographically.
template <typename Scalar>
void select_nearest(std::vector<std::pair<Scalar, Index>>& cand, Index k) {
  auto kth = cand.begin() + k;
  if (kth != cand.end()) std::nth_element(cand.begin(), kth - 1, cand.end());
  std::sort(cand.begin(), kth);
}

template <typename Scalar, typename Derived, typename Point>
void fill_candidates(const Eigen::MatrixBase<Derived>& x, const Point& q, Index skip,
                     std::vector<std::pair<Scalar, Index>>& cand) {
  cand.clear();
  const Index n = x.rows();
  const Index d = x.cols();
  for (Index j = 0; j < n; ++j) {
    if (j == skip) continue;
    Scalar s = 0;
    for (Index c = 0; c < d; ++c) {
      const Scalar diff = x(j, c) - q(c);
      s += diff * diff;
    }
    cand.emplace_back(s, j);
  }
}

}  // namespace detail

//! All-pairs O(d n^2) construction. Rows are independent, so `threads` > 1
//! splits them across workers without changing the result.
template <typename Derived>
KnnIndex<typename Derived::Scalar> build_knn(const Eigen::MatrixBase<Derived>& x, Index k,
                                             unsigned threads = 1) {
  using Scalar = typename Derived::Scalar;
  const Index n = x.rows();
  if (k < 1) throw Error(Errc::BadParams, "build_knn: k must be at least 1");
  if (k >= n) {
    throw Error(Errc::KTooLarge, "build_knn: k = " + std::to_string(k) +
                                     " needs more than k points, sample has " +
                                     std::to_string(n));
  }
  KnnIndex<Scalar> index;
  index.k = k;
  index.ids.resize(n, k);
  index.dists.resize(n, k);

  constexpr Index kRowBlock = 64;
  const Index blocks = (n + kRowBlock - 1) / kRowBlock;
  parallel_for(static_cast<std::size_t>(blocks), threads, [&](std::size_t b) {
    std::vector<std::pair<Scalar, Index>> cand;
    cand.reserve(static_cast<std::size_t>(n));
    const Index end = std::min(n, static_cast<Index>(b + 1) * kRowBlock);
    for (Index i = static_cast<Index>(b) * kRowBlock; i < end; ++i) {
      detail::fill_candidates<Scalar>(x, x.row(i), i, cand);
      detail::select_nearest(cand, k);
      for (Index j = 0; j < k; ++j) {
        index.ids(i, j) = cand[static_cast<std::size_t>(j)].second;
        index.dists(i, j) = std::sqrt(cand[static_cast<std::size_t>(j)].first);
      }
    }
  });
  return index;
}

//! k nearest points of `x` to an external query point (no self exclusion).
template <typename Derived, typename QDerived>
Neighbors<typename Derived::Scalar> query_neighbors(const Eigen::MatrixBase<Derived>& x,
                                                    const Eigen::MatrixBase<QDerived>& q, Index k) {
  using Scalar = typename Derived::Scalar;
  const Index n = x.rows();
  if (k < 1) throw Error(Errc::BadParams, "query_neighbors: k must be at least 1");
  if (k > n) {
    throw Error(Errc::KTooLarge, "query_neighbors: k = " + std::to_string(k) +
                                     " exceeds sample size " + std::to_string(n));
  }
  if (q.size() != x.cols()) {
    throw Error(Errc::DimensionMismatch, "query_neighbors: query dimension differs from data");
  }
  std::vector<std::pair<Scalar, Index>> cand;
  cand.reserve(static_cast<std::size_t>(n));
  detail::fill_candidates<Scalar>(x, q, Index(-1), cand);
  detail::select_nearest(cand, k);
  Neighbors<Scalar> out;
  out.ids.reserve(static_cast<std::size_t>(k));
  out.dists.reserve(static_cast<std::size_t>(k));
  for (Index j = 0; j < k; ++j) {
    out.ids.push_back(cand[static_cast<std::size_t>(j)].second);
    out.dists.push_back(std::sqrt(cand[static_cast<std::size_t>(j)].first));
  }
  return out;
}

//! Distance from point i to its k-th nearest other point.
template <typename Scalar>
Scalar kth_distance(const KnnIndex<Scalar>& index, Index i) {
  if (i < 0 || i >= index.size()) {
    throw Error(Errc::BadIndex, "kth_distance: point id " + std::to_string(i) + " out of range");
  }
  return index.dists(i, index.k - 1);
}

}  // namespace knnrex
