#pragma once

#include "knnrex/errors.hpp"
#include "knnrex/types.hpp"

#include <functional>
#include <vector>

namespace knnrex {

//! A density known pointwise, with its gradient and an upper bound on any
//! ball, used to check the small-ball covariance expansion.
struct DensityModel {
  Index dim = 0;
  std::function<double(const Vectord&)> density;
  std::function<Vectord(const Vectord&)> gradient;
  //! Upper bound of the density on the ball of radius delta around center.
  std::function<double(const Vectord& center, double delta)> upper_bound;
};

DensityModel uniform_density(Index dim);
//! f(y) = 1 + a (y_0 - x_0) around the origin, truncated at zero.
DensityModel linear_density(Index dim, double slope);

//! delta^2/(d+2) I - delta^4/(d+2)^2 (grad f grad f^T / f^2)(x).
Matrixd ball_cov_theory(const DensityModel& model, const Vectord& x, double delta);

struct BallCovEstimate {
  Matrixd cov;
  //! Standard error of each covariance entry.
  Matrixd stderr_;
  double acceptance = 0.0;
};

//! Rejection-samples f restricted to the ball B(x, delta) from uniform cube
//! proposals and returns the 1/N sample covariance. Samples are drawn in
//! fixed chunks from streams derived from one draw of `rng`, and partial sums
//! are merged in chunk order.
BallCovEstimate ball_cov_mc(const DensityModel& model, const Vectord& x, double delta,
                            Index n_samples, Rng& rng, unsigned threads = 1);

struct AsymptoticsRow {
  double delta = 0.0;
  Matrixd theory;
  Matrixd mc;
  double max_deviation = 0.0;
  double max_stderr = 0.0;
  //! Largest |theory - mc| / stderr over entries with a positive stderr.
  double max_zscore = 0.0;
  //! Spectral norm of the isotropic delta^2/(d+2) I term.
  double first_norm = 0.0;
  //! Spectral norm of the rank-one correction, predicted and measured
  //! (first term minus the Monte-Carlo covariance).
  double second_theory = 0.0;
  double second_mc = 0.0;
  //! Unit eigenvector of the measured correction's largest |eigenvalue|.
  Vectord second_direction;
};

struct AsymptoticsReport {
  Vectord x;
  std::vector<AsymptoticsRow> rows;
  //! second_mc[i] / second_mc[i+1] for consecutive deltas.
  std::vector<double> second_scaling;
};

AsymptoticsReport asymptotics_report(const DensityModel& model, const Vectord& x,
                                     const std::vector<double>& deltas, Index n_samples, Rng& rng,
                                     unsigned threads = 1);

}  // namespace knnrex
