#include "knnrex/evaluation.hpp"

#include "knnrex/parallel.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace knnrex {

Index BinningSpec::bin_index(Index dim, double value) const {
  const auto& e = edges[static_cast<std::size_t>(dim)];
  if (e.size() <= 2) return 0;
  const auto inner_begin = e.begin() + 1;
  const auto inner_end = e.end() - 1;
  return static_cast<Index>(std::upper_bound(inner_begin, inner_end, value) - inner_begin);
}

namespace {

BinningSpec binning_from_range(const Vectord& lo, const Vectord& hi, Index bins_per_dim) {
  BinningSpec spec;
  spec.edges.resize(static_cast<std::size_t>(lo.size()));
  for (Index j = 0; j < lo.size(); ++j) {
    auto& e = spec.edges[static_cast<std::size_t>(j)];
    if (!(hi(j) > lo(j))) {
      e = {lo(j), hi(j)};
      continue;
    }
    e.resize(static_cast<std::size_t>(bins_per_dim) + 1);
    const double width = (hi(j) - lo(j)) / static_cast<double>(bins_per_dim);
    for (Index b = 0; b < bins_per_dim; ++b) e[static_cast<std::size_t>(b)] = lo(j) + static_cast<double>(b) * width;
    e.back() = hi(j);
  }
  return spec;
}

}  // namespace

BinningSpec make_binning(const PointSetd& data, Index bins_per_dim) {
  if (data.rows() == 0) throw Error(Errc::EmptyData, "make_binning: no data");
  if (bins_per_dim < 1) throw Error(Errc::BadParams, "make_binning: need at least one bin");
  return binning_from_range(data.colwise().minCoeff().transpose(),
                            data.colwise().maxCoeff().transpose(), bins_per_dim);
}

BinningSpec make_binning(const PointSetd& a, const PointSetd& b, Index bins_per_dim) {
  if (a.rows() == 0 && b.rows() == 0) throw Error(Errc::EmptyData, "make_binning: no data");
  if (a.rows() == 0) return make_binning(b, bins_per_dim);
  if (b.rows() == 0) return make_binning(a, bins_per_dim);
  if (a.cols() != b.cols()) throw Error(Errc::DimensionMismatch, "make_binning: dimensions differ");
  if (bins_per_dim < 1) throw Error(Errc::BadParams, "make_binning: need at least one bin");
  const Vectord lo = a.colwise().minCoeff().transpose().cwiseMin(b.colwise().minCoeff().transpose());
  const Vectord hi = a.colwise().maxCoeff().transpose().cwiseMax(b.colwise().maxCoeff().transpose());
  return binning_from_range(lo, hi, bins_per_dim);
}

std::vector<std::pair<BinKey, Index>> histogram(const PointSetd& data, const BinningSpec& binning) {
  if (data.cols() != binning.dims()) {
    throw Error(Errc::DimensionMismatch, "histogram: data and binning dimensions differ");
  }
  std::vector<BinKey> keys(static_cast<std::size_t>(data.rows()), BinKey(static_cast<std::size_t>(data.cols())));
  for (Index i = 0; i < data.rows(); ++i) {
    auto& key = keys[static_cast<std::size_t>(i)];
    for (Index j = 0; j < data.cols(); ++j) {
      key[static_cast<std::size_t>(j)] = static_cast<std::uint32_t>(binning.bin_index(j, data(i, j)));
    }
  }
  std::sort(keys.begin(), keys.end());
  std::vector<std::pair<BinKey, Index>> out;
  for (auto& key : keys) {
    if (!out.empty() && out.back().first == key) {
      ++out.back().second;
    } else {
      out.emplace_back(std::move(key), 1);
    }
  }
  return out;
}

double hellinger(const PointSetd& y, const PointSetd& z, const BinningSpec& binning) {
  if (y.rows() == 0 || z.rows() == 0) throw Error(Errc::EmptyData, "hellinger: empty point set");
  const auto hy = histogram(y, binning);
  const auto hz = histogram(z, binning);
  const double ny = static_cast<double>(y.rows());
  const double nz = static_cast<double>(z.rows());
  // Merge of the two sorted sparse histograms; bins empty in both add nothing.
  double sum = 0;
  std::size_t a = 0;
  std::size_t b = 0;
  while (a < hy.size() || b < hz.size()) {
    double p = 0;
    double q = 0;
    if (b == hz.size() || (a < hy.size() && hy[a].first < hz[b].first)) {
      p = static_cast<double>(hy[a++].second) / ny;
    } else if (a == hy.size() || hz[b].first < hy[a].first) {
      q = static_cast<double>(hz[b++].second) / nz;
    } else {
      p = static_cast<double>(hy[a++].second) / ny;
      q = static_cast<double>(hz[b++].second) / nz;
    }
    const double diff = std::sqrt(p) - std::sqrt(q);
    sum += diff * diff;
  }
  return std::clamp(std::sqrt(0.5 * sum), 0.0, 1.0);
}

std::pair<double, double> mean_stddev(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1))};
}

IcvReport icv_run(const PointSetd& data, const EstimatorConfig& cfg, Index folds,
                  Index bins_per_dim) {
  if (folds < 2) throw Error(Errc::BadParams, "icv_run: need at least two folds");
  if (data.rows() < folds) {
    throw Error(Errc::TooFewPoints, "icv_run: " + std::to_string(data.rows()) +
                                        " points cannot fill " + std::to_string(folds) + " folds");
  }
  if (cfg.method == Method::KnnRexCorrected) {
    throw Error(Errc::BadParams, "icv_run: the bias-corrected method needs marginals");
  }
  IcvReport report;
  report.config = cfg;
  report.folds = folds;
  report.bins_per_dim = bins_per_dim;
  report.n_total = data.rows();
  const Index fold_size = data.rows() / folds;
  report.n_used = fold_size * folds;
  report.train_size = fold_size;
  report.synth_size = (folds - 1) * fold_size;

  // One shuffle fixes both the fold assignment and the dropped remainder.
  std::vector<Index> order(static_cast<std::size_t>(data.rows()));
  std::iota(order.begin(), order.end(), Index(0));
  Rng shuffler(cfg.seed);
  std::shuffle(order.begin(), order.end(), shuffler);

  report.hellinger.assign(static_cast<std::size_t>(folds), 0.0);
  report.baseline.assign(static_cast<std::size_t>(folds), 0.0);
  report.seconds.assign(static_cast<std::size_t>(folds), 0.0);

  parallel_for(static_cast<std::size_t>(folds), cfg.threads, [&](std::size_t f) {
    const auto start = std::chrono::steady_clock::now();
    PointSetd train(fold_size, data.cols());
    PointSetd test(report.synth_size, data.cols());
    Index tr = 0;
    Index te = 0;
    for (Index pos = 0; pos < report.n_used; ++pos) {
      const Index row = order[static_cast<std::size_t>(pos)];
      if (pos / fold_size == static_cast<Index>(f)) {
        train.row(tr++) = data.row(row);
      } else {
        test.row(te++) = data.row(row);
      }
    }
    EstimatorConfig fold_cfg = cfg;
    fold_cfg.threads = 1;
    fold_cfg.seed = derived_stream(cfg.seed, f, 1)();
    const PointSetd synth = synthesize(train, fold_cfg, report.synth_size).points;

    report.hellinger[f] = hellinger(synth, test, make_binning(synth, test, bins_per_dim));
    report.baseline[f] = hellinger(train, test, make_binning(train, test, bins_per_dim));
    report.seconds[f] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });

  std::tie(report.mean, report.stddev) = mean_stddev(report.hellinger);
  std::tie(report.baseline_mean, report.baseline_stddev) = mean_stddev(report.baseline);
  return report;
}

WelchResult welch_t(double mean_a, double sd_a, Index n_a, double mean_b, double sd_b, Index n_b) {
  if (n_a < 2 || n_b < 2) throw Error(Errc::BadParams, "welch_t: each group needs n >= 2");
  if (sd_a < 0 || sd_b < 0) throw Error(Errc::BadParams, "welch_t: negative standard deviation");
  if (sd_a == 0 && sd_b == 0) {
    throw Error(Errc::DegenerateVariance, "welch_t: both standard deviations are zero");
  }
  const double va = sd_a * sd_a / static_cast<double>(n_a);
  const double vb = sd_b * sd_b / static_cast<double>(n_b);
  WelchResult r;
  r.t = (mean_a - mean_b) / std::sqrt(va + vb);
  r.dof = (va + vb) * (va + vb) /
          (va * va / static_cast<double>(n_a - 1) + vb * vb / static_cast<double>(n_b - 1));
  const boost::math::students_t dist(r.dof);
  r.p = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t))));
  return r;
}

}  // namespace knnrex
