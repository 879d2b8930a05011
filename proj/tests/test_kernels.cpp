#include "knnrex/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace knnrex;

namespace {

struct Moments {
  Vectord mean;
  Matrixd cov;
};

Moments draw_moments(const PointSetd& kcs, Index draws, std::uint64_t seed) {
  Rng rng(seed);
  const Index d = kcs.cols();
  Vectord sum = Vectord::Zero(d);
  Matrixd outer = Matrixd::Zero(d, d);
  for (Index i = 0; i < draws; ++i) {
    const Vectord y = rex_sample(kcs, rng);
    sum += y;
    outer.noalias() += y * y.transpose();
  }
  Moments mo;
  mo.mean = sum / static_cast<double>(draws);
  mo.cov = outer / static_cast<double>(draws) - mo.mean * mo.mean.transpose();
  return mo;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("KCS statistics on the unit square") {
  PointSetd kcs(4, 2);
  kcs << 0, 0, 1, 0, 0, 1, 1, 1;
  const auto s = kcs_stats(kcs);
  CHECK(s.mu(0) == doctest::Approx(0.5));
  CHECK(s.mu(1) == doctest::Approx(0.5));
  CHECK(s.sigma(0, 0) == doctest::Approx(0.25));
  CHECK(s.sigma(1, 1) == doctest::Approx(0.25));
  CHECK(s.sigma(0, 1) == doctest::Approx(0.0));

  PointSetd diag(2, 2);
  diag << 0, 0, 1.4142135623730951, 1.4142135623730951;
  const auto t = kcs_stats(diag);
  CHECK(t.sigma(0, 0) == doctest::Approx(0.5));
  CHECK(t.sigma(0, 1) == doctest::Approx(0.5));

  try {
    kcs_stats(PointSetd(0, 2));
    FAIL("expected EmptyKcs");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyKcs);
  }
}

TEST_CASE("degenerate KCS reproduce their points exactly") {
  Rng rng(3);
  PointSetd one(1, 3);
  one << 1.5, -2.25, 7.0;
  for (int i = 0; i < 20; ++i) CHECK(rex_sample(one, rng) == one.row(0).transpose());

  PointSetd same(4, 2);
  same << 2, 3, 2, 3, 2, 3, 2, 3;
  for (int i = 0; i < 20; ++i) {
    const Vectord y = rex_sample(same, rng);
    CHECK(y(0) == 2.0);
    CHECK(y(1) == 3.0);
  }
}

TEST_CASE("draw reproduces the defining formula with the same variates") {
  PointSetd kcs(3, 2);
  kcs << 0, 1, 4, -1, 2, 6;
  Rng a(77);
  const Vectord y = rex_sample(kcs, a);

  Rng b(77);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(3.0));
  double eps[3];
  for (double& e : eps) e = normal(b);
  const Vectord mu = kcs.colwise().mean().transpose();
  Vectord expect = mu;
  for (int i = 0; i < 3; ++i) expect += eps[i] * (kcs.row(i).transpose() - mu);
  CHECK((y - expect).cwiseAbs().maxCoeff() < 1e-14);

  // The stream advanced by exactly m variates.
  CHECK(a() == b());
}

TEST_CASE("member-span sampling matches the whole-KCS form") {
  PointSetd x(5, 2);
  x << 0, 0, 9, 9, 1, 2, 3, 1, 5, 5;
  const std::vector<Index> members{2, 3};
  PointSetd kcs(2, 2);
  kcs << 1, 2, 3, 1;
  Rng a(5), b(5);
  RexScratch<double> scratch;
  Vectord y(2);
  rex_sample_members(x, std::span<const Index>(members), a, scratch, y);
  CHECK((y - rex_sample(kcs, b)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("sample moments match the KCS statistics") {
  PointSetd kcs(3, 2);
  kcs << 0, 0, 3, 1, 1, 4;
  const auto s = kcs_stats(kcs);
  const auto mo = draw_moments(kcs, 1000000, 11);
  CHECK((mo.mean - s.mu).cwiseAbs().maxCoeff() < 0.005 * std::max(1.0, s.mu.cwiseAbs().maxCoeff()));
  CHECK((mo.cov - s.sigma).cwiseAbs().maxCoeff() < 0.01 * s.sigma.cwiseAbs().maxCoeff());
}

TEST_CASE("density of a two-dimensional KCS") {
  PointSetd kcs(4, 2);
  kcs << 0, 0, 1, 0, 0, 1, 1, 1;
  Vectord y(2);
  y << 0.5, 0.5;
  // N(mu, 0.25 I) at its mean: 1 / (2 pi * 0.25).
  CHECK(std::abs(rex_density(y, kcs) - 2.0 / std::numbers::pi) < 1e-9);

  PointSetd cross(4, 2);
  cross << -1, 0, 1, 0, 0, 1, 0, -1;
  CHECK(std::abs(rex_density(Vectord::Zero(2), cross) - 1.0 / std::numbers::pi) < 1e-9);

  Vectord a(2), b(2);
  a << 0.9, 0.1;
  b << 0.1, 0.9;
  CHECK(rex_density(a, kcs) == doctest::Approx(rex_density(b, kcs)).epsilon(1e-12));
  a << 0.5 + 0.3, 0.5;
  b << 0.5 - 0.3, 0.5;
  CHECK(rex_density(a, kcs) == doctest::Approx(rex_density(b, kcs)).epsilon(1e-12));
}

TEST_CASE("singular kernels are rejected unless a ridge is added") {
  PointSetd kcs(2, 2);
  kcs << 0, 0, 1, 1;
  Vectord y(2);
  y << 0.5, 0.5;
  try {
    rex_density(y, kcs);
    FAIL("expected SingularSigma");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SingularSigma);
  }
  CHECK(rex_density(y, kcs, 1e-3) > 0.0);

  Vectord bad(3);
  bad.setZero();
  CHECK_THROWS_AS(rex_density(bad, kcs, 1e-3), Error);
}

TEST_CASE("density integrates to one") {
  SUBCASE("d = 1") {
    PointSetd kcs(3, 1);
    kcs << -1, 0.5, 2;
    const double lo = -8, hi = 9;
    const int steps = 20000;
    const double dx = (hi - lo) / steps;
    double total = 0;
    Vectord y(1);
    for (int i = 0; i < steps; ++i) {
      y(0) = lo + (i + 0.5) * dx;
      total += rex_density(y, kcs) * dx;
    }
    CHECK(std::abs(total - 1.0) < 1e-3);
  }
  SUBCASE("d = 2") {
    PointSetd kcs(3, 2);
    kcs << 0, 0, 2, 1, 1, 3;
    const auto s = kcs_stats(kcs);
    const GaussianDensity<double> g(s.mu, s.sigma);
    const double lo = -6, hi = 7;
    const int steps = 600;
    const double dx = (hi - lo) / steps;
    double total = 0;
    Vectord y(2);
    for (int i = 0; i < steps; ++i) {
      for (int j = 0; j < steps; ++j) {
        y << lo + (i + 0.5) * dx, lo + (j + 0.5) * dx;
        total += g.density(y) * dx * dx;
      }
    }
    CHECK(std::abs(total - 1.0) < 1e-3);
  }
}

TEST_CASE("fixed Gaussian draws") {
  Rng rng(8);
  Vectord c(3);
  c << 1, 2, 3;
  CHECK(gaussian_sample(c, 0.0, rng) == c);
  CHECK(gaussian_sample(c, 0.5, rng).size() == 3);
  CHECK_THROWS_AS(gaussian_sample(c, -1.0, rng), Error);

  Vectord zero = Vectord::Zero(1);
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double v = gaussian_sample(zero, 2.0, rng)(0);
    sum += v;
    sq += v * v;
  }
  const double var = sq / n - (sum / n) * (sum / n);
  CHECK(std::abs(var - 4.0) < 0.04);
}

}
