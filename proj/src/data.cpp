#include "knnrex/data.hpp"

#include "knnrex/errors.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace knnrex {

void validate_gmm(const GmmSpec& spec) {
  auto fail = [](const std::string& what) { throw Error(Errc::BadSpec, what); };
  const std::size_t c = spec.weights.size();
  if (c == 0) fail("mixture has no components");
  if (spec.means.size() != c || spec.covariances.size() != c) {
    fail("weights, means and covariances must have one entry per component");
  }
  double sum = 0;
  for (double w : spec.weights) {
    if (!(w >= 0)) fail("negative mixture weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) fail("mixture weights must sum to 1");
  const Index d = spec.dims();
  if (d == 0) fail("zero-dimensional mixture");
  for (std::size_t i = 0; i < c; ++i) {
    const Matrixd& cov = spec.covariances[i];
    if (spec.means[i].size() != d || cov.rows() != d || cov.cols() != d) {
      fail("component " + std::to_string(i) + " has inconsistent dimensions");
    }
    if (!cov.isApprox(cov.transpose(), 1e-12)) fail("covariance " + std::to_string(i) + " is not symmetric");
    Eigen::LLT<Matrixd> llt(cov);
    if (llt.info() != Eigen::Success) fail("covariance " + std::to_string(i) + " is not positive definite");
  }
}

PointSetd gen_swiss_roll(Index n, Rng& rng) {
  if (n < 0) throw Error(Errc::BadParams, "gen_swiss_roll: negative size");
  constexpr double pi = std::numbers::pi;
  std::uniform_real_distribution<double> angle(1.5 * pi, 4.5 * pi);
  std::uniform_real_distribution<double> height(0.0, 21.0);
  PointSetd x(n, 3);
  for (Index i = 0; i < n; ++i) {
    const double t = angle(rng);
    const double u = height(rng);
    x(i, 0) = t * std::cos(t);
    x(i, 1) = u;
    x(i, 2) = t * std::sin(t);
  }
  return x;
}

PointSetd gen_ring(Index n, Rng& rng) {
  if (n < 0) throw Error(Errc::BadParams, "gen_ring: negative size");
  std::normal_distribution<double> radius(1.0, 0.1);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  PointSetd x(n, 2);
  for (Index i = 0; i < n; ++i) {
    const double r = radius(rng);
    const double a = angle(rng);
    x(i, 0) = r * std::cos(a);
    x(i, 1) = r * std::sin(a);
  }
  return x;
}

PointSetd gen_gmm(const GmmSpec& spec, Index n, Rng& rng, std::vector<Index>* labels) {
  validate_gmm(spec);
  if (n < 0) throw Error(Errc::BadParams, "gen_gmm: negative size");
  const Index d = spec.dims();
  std::vector<Matrixd> factors;
  for (const auto& cov : spec.covariances) factors.push_back(Eigen::LLT<Matrixd>(cov).matrixL());
  std::discrete_distribution<Index> component(spec.weights.begin(), spec.weights.end());
  std::normal_distribution<double> normal(0.0, 1.0);
  PointSetd x(n, d);
  if (labels) labels->assign(static_cast<std::size_t>(n), 0);
  Vectord z(d);
  for (Index i = 0; i < n; ++i) {
    const Index c = component(rng);
    for (Index j = 0; j < d; ++j) z(j) = normal(rng);
    x.row(i) = (spec.means[static_cast<std::size_t>(c)] + factors[static_cast<std::size_t>(c)] * z).transpose();
    if (labels) (*labels)[static_cast<std::size_t>(i)] = c;
  }
  return x;
}

}  // namespace knnrex
