#pragma once

#include "knnrex/errors.hpp"
#include "knnrex/types.hpp"

#include <vector>

namespace knnrex {

//! Gaussian mixture used as a controlled-truth fixture.
struct GmmSpec {
  std::vector<double> weights;
  std::vector<Vectord> means;
  std::vector<Matrixd> covariances;

  Index dims() const { return means.empty() ? 0 : means.front().size(); }
};

//! Throws BadSpec unless weights are non-negative and sum to 1 (within
//! 1e-12), and every covariance is symmetric positive definite.
void validate_gmm(const GmmSpec& spec);

//! (t cos t, u, t sin t) with t ~ U[1.5 pi, 4.5 pi] and u ~ U[0, 21].
PointSetd gen_swiss_roll(Index n, Rng& rng);

//! Radius ~ N(1, 0.1^2), angle ~ U[0, 2 pi).
PointSetd gen_ring(Index n, Rng& rng);

//! I.i.d. mixture draws; `labels`, when given, receives each draw's component.
PointSetd gen_gmm(const GmmSpec& spec, Index n, Rng& rng, std::vector<Index>* labels = nullptr);

}  // namespace knnrex
