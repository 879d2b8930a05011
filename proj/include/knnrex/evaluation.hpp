#pragma once

#include "knnrex/estimators.hpp"
#include "knnrex/errors.hpp"
#include "knnrex/types.hpp"

#include <cstdint>
#include <vector>

namespace knnrex {

//! Joint equal-width binning. Dimension j has edges[j].size() - 1 bins; a
//! constant column gets one degenerate bin with edges {v, v}. Points outside
//! the edges clamp to the boundary bins.
struct BinningSpec {
  std::vector<std::vector<double>> edges;

  Index dims() const { return static_cast<Index>(edges.size()); }
  Index bins(Index dim) const { return static_cast<Index>(edges[static_cast<std::size_t>(dim)].size()) - 1; }
  //! Index of the bin holding `value` along `dim` (clamped).
  Index bin_index(Index dim, double value) const;
};

using BinKey = std::vector<std::uint32_t>;

BinningSpec make_binning(const PointSetd& data, Index bins_per_dim);
//! Binning spanning the union of two point sets.
BinningSpec make_binning(const PointSetd& a, const PointSetd& b, Index bins_per_dim);

//! Occupied bins with their counts, sorted by key.
std::vector<std::pair<BinKey, Index>> histogram(const PointSetd& data, const BinningSpec& binning);

//! Binned Hellinger distance sqrt(1/2 sum_b (sqrt(|Y_b|/|Y|) - sqrt(|Z_b|/|Z|))^2).
double hellinger(const PointSetd& y, const PointSetd& z, const BinningSpec& binning);

struct IcvReport {
  EstimatorConfig config;
  Index folds = 0;
  Index bins_per_dim = 0;
  Index n_total = 0;
  Index n_used = 0;
  Index train_size = 0;
  Index synth_size = 0;
  std::vector<double> hellinger;
  std::vector<double> baseline;
  std::vector<double> seconds;
  double mean = 0.0;
  double stddev = 0.0;
  double baseline_mean = 0.0;
  double baseline_stddev = 0.0;
};

//! Mean and sample standard deviation (n - 1 normalizer).
std::pair<double, double> mean_stddev(const std::vector<double>& values);

//! Inverted cross-validation: shuffle once with cfg.seed, drop the remainder,
//! train on each fold of n/folds points, synthesize (folds-1) n/folds points
//! and score them against the other folds with a binning built on
//! synthesized U test. The copying baseline scores the raw fold the same way.
//! Folds run on cfg.threads workers; each owns a stream derived from
//! (cfg.seed, fold), so results do not depend on the thread count.
IcvReport icv_run(const PointSetd& data, const EstimatorConfig& cfg, Index folds = 100,
                  Index bins_per_dim = 10);

struct WelchResult {
  double t = 0.0;
  double dof = 0.0;
  double p = 1.0;
};

//! Two-sided Welch t-test from summary statistics.
WelchResult welch_t(double mean_a, double sd_a, Index n_a, double mean_b, double sd_b, Index n_b);

}  // namespace knnrex
