#include "knnrex/asymptotics.hpp"

#include "knnrex/errors.hpp"
#include "knnrex/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace knnrex {

DensityModel uniform_density(Index dim) {
  DensityModel m;
  m.dim = dim;
  m.density = [](const Vectord&) { return 1.0; };
  m.gradient = [dim](const Vectord&) { return Vectord::Zero(dim); };
  m.upper_bound = [](const Vectord&, double) { return 1.0; };
  return m;
}

DensityModel linear_density(Index dim, double slope) {
  DensityModel m;
  m.dim = dim;
  m.density = [slope](const Vectord& y) { return std::max(0.0, 1.0 + slope * y(0)); };
  m.gradient = [dim, slope](const Vectord&) {
    Vectord g = Vectord::Zero(dim);
    g(0) = slope;
    return g;
  };
  m.upper_bound = [slope](const Vectord& c, double delta) {
    return std::max(0.0, 1.0 + slope * c(0) + std::abs(slope) * delta);
  };
  return m;
}

Matrixd ball_cov_theory(const DensityModel& model, const Vectord& x, double delta) {
  if (!(delta > 0)) throw Error(Errc::BadParams, "ball_cov_theory: delta must be positive");
  const double f = model.density(x);
  if (!(f > 0)) throw Error(Errc::ZeroDensity, "ball_cov_theory: density vanishes at the center");
  const auto d = static_cast<double>(model.dim);
  const Vectord g = model.gradient(x) / f;
  const double a = delta * delta / (d + 2);
  return a * Matrixd::Identity(model.dim, model.dim) - a * a * (g * g.transpose());
}

namespace {

constexpr Index kMcChunk = 65536;

struct MomentSums {
  Index count = 0;
  Index proposals = 0;
  Vectord s1;
  Matrixd s2;
  Matrixd s4;  // sums of squared outer-product entries, for standard errors
};

}  // namespace

BallCovEstimate ball_cov_mc(const DensityModel& model, const Vectord& x, double delta,
                            Index n_samples, Rng& rng, unsigned threads) {
  const Index d = model.dim;
  if (!(delta > 0)) throw Error(Errc::BadParams, "ball_cov_mc: delta must be positive");
  if (n_samples < 2) throw Error(Errc::BadParams, "ball_cov_mc: need at least two samples");
  if (!(model.density(x) > 0)) {
    throw Error(Errc::ZeroDensity, "ball_cov_mc: density vanishes at the center");
  }
  const double bound = model.upper_bound(x, delta);
  const std::uint64_t base = rng();
  const Index chunks = (n_samples + kMcChunk - 1) / kMcChunk;
  std::vector<MomentSums> parts(static_cast<std::size_t>(chunks));

  parallel_for(static_cast<std::size_t>(chunks), threads, [&](std::size_t c) {
    Rng stream = derived_stream(base, c, 7);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> accept(0.0, bound);
    const Index want = std::min(kMcChunk, n_samples - static_cast<Index>(c) * kMcChunk);
    MomentSums& s = parts[c];
    s.s1 = Vectord::Zero(d);
    s.s2 = Matrixd::Zero(d, d);
    s.s4 = Matrixd::Zero(d, d);
    Vectord u(d);
    Vectord y(d);
    while (s.count < want) {
      ++s.proposals;
      if (s.proposals > 10000 && static_cast<double>(s.count) < 1e-4 * static_cast<double>(s.proposals)) {
        throw Error(Errc::RejectionStall, "ball_cov_mc: acceptance rate below 1e-4");
      }
      for (Index j = 0; j < d; ++j) u(j) = unit(stream);
      if (u.squaredNorm() > 1.0) continue;
      y = x + delta * u;
      if (accept(stream) >= model.density(y)) continue;
      // Accumulate offsets from the center to keep the sums well scaled.
      const Vectord off = y - x;
      const Matrixd outer = off * off.transpose();
      s.s1 += off;
      s.s2 += outer;
      s.s4 += outer.cwiseProduct(outer);
      ++s.count;
    }
  });

  MomentSums total;
  total.s1 = Vectord::Zero(d);
  total.s2 = Matrixd::Zero(d, d);
  total.s4 = Matrixd::Zero(d, d);
  for (const auto& p : parts) {
    total.count += p.count;
    total.proposals += p.proposals;
    total.s1 += p.s1;
    total.s2 += p.s2;
    total.s4 += p.s4;
  }
  const double n = static_cast<double>(total.count);
  const Vectord mean = total.s1 / n;
  const Matrixd second = total.s2 / n;
  BallCovEstimate est;
  est.cov = second - mean * mean.transpose();
  const Matrixd var_outer = (total.s4 / n - second.cwiseProduct(second)).cwiseMax(0.0);
  est.stderr_ = (var_outer / n).cwiseSqrt();
  est.acceptance = n / static_cast<double>(total.proposals);
  return est;
}

AsymptoticsReport asymptotics_report(const DensityModel& model, const Vectord& x,
                                     const std::vector<double>& deltas, Index n_samples, Rng& rng,
                                     unsigned threads) {
  if (deltas.empty()) throw Error(Errc::BadParams, "asymptotics_report: no deltas");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0) || (i > 0 && !(deltas[i] < deltas[i - 1]))) {
      throw Error(Errc::BadParams, "asymptotics_report: deltas must be positive and decreasing");
    }
  }
  AsymptoticsReport report;
  report.x = x;
  const auto d = static_cast<double>(model.dim);
  for (double delta : deltas) {
    AsymptoticsRow row;
    row.delta = delta;
    row.theory = ball_cov_theory(model, x, delta);
    const BallCovEstimate est = ball_cov_mc(model, x, delta, n_samples, rng, threads);
    row.mc = est.cov;
    row.max_deviation = (row.theory - row.mc).cwiseAbs().maxCoeff();
    row.max_stderr = est.stderr_.maxCoeff();
    for (Index i = 0; i < model.dim; ++i) {
      for (Index j = 0; j < model.dim; ++j) {
        if (est.stderr_(i, j) > 0) {
          row.max_zscore = std::max(row.max_zscore,
                                    std::abs(row.theory(i, j) - row.mc(i, j)) / est.stderr_(i, j));
        }
      }
    }
    const double first = delta * delta / (d + 2);
    row.first_norm = first;
    const Matrixd identity = Matrixd::Identity(model.dim, model.dim);
    const Eigen::SelfAdjointEigenSolver<Matrixd> predicted(first * identity - row.theory);
    row.second_theory = predicted.eigenvalues().cwiseAbs().maxCoeff();
    const Eigen::SelfAdjointEigenSolver<Matrixd> measured(first * identity - row.mc);
    Index arg = 0;
    row.second_mc = measured.eigenvalues().cwiseAbs().maxCoeff(&arg);
    row.second_direction = measured.eigenvectors().col(arg);
    report.rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i + 1 < report.rows.size(); ++i) {
    report.second_scaling.push_back(report.rows[i].second_mc / report.rows[i + 1].second_mc);
  }
  return report;
}

}  // namespace knnrex
