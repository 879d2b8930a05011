#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace knnrex {

using Index = Eigen::Index;

//! n x d matrix, one point per row.
template <typename Scalar>
using PointSet = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using PointSetd = PointSet<double>;
using Vectord = Vector<double>;
using Matrixd = Matrix<double>;

//! A point set together with its column names (as read from / written to CSV).
struct Dataset {
  PointSetd points;
  std::vector<std::string> columns;

  Index rows() const { return points.rows(); }
  Index dims() const { return points.cols(); }
};

//! The random stream used throughout. All stochastic routines take one by
//! reference; results are fully determined by its state.
using Rng = std::mt19937_64;

//! Independent stream for sub-task `index` of a run seeded with `base`.
inline Rng derived_stream(std::uint64_t base, std::uint64_t index, std::uint64_t tag = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(tag)};
  return Rng(seq);
}

}  // namespace knnrex
