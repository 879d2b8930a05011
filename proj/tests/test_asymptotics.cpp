#include "knnrex/asymptotics.hpp"

#include <doctest.h>

#include <cmath>

using namespace knnrex;

namespace {

Vectord origin(Index d) { return Vectord::Zero(d); }

}  // namespace

TEST_SUITE("asymptotics") {

TEST_CASE("theory matrix") {
  const Matrixd one = ball_cov_theory(uniform_density(1), origin(1), 1.0);
  CHECK(one(0, 0) == doctest::Approx(1.0 / 3.0));

  const Matrixd two = ball_cov_theory(uniform_density(2), origin(2), 0.1);
  CHECK(two(0, 0) == doctest::Approx(0.0025));
  CHECK(two(1, 1) == doctest::Approx(0.0025));
  CHECK(two(0, 1) == 0.0);

  const Matrixd lin = ball_cov_theory(linear_density(2, 5.0), origin(2), 0.2);
  CHECK(lin(0, 0) == doctest::Approx(0.01 - 0.0016 / 16.0 * 25.0));
  CHECK(lin(1, 1) == doctest::Approx(0.01));
  CHECK(lin(0, 1) == 0.0);

  Vectord dead(2);
  dead << -1.0, 0.0;
  try {
    ball_cov_theory(linear_density(2, 1.0), dead, 0.1);
    FAIL("expected ZeroDensity");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ZeroDensity);
  }
}

TEST_CASE("gradient of the linear model matches finite differences") {
  const auto model = linear_density(3, 2.5);
  Vectord y(3);
  y << 0.1, -0.2, 0.3;
  const Vectord g = model.gradient(y);
  for (Index j = 0; j < 3; ++j) {
    Vectord hi = y, lo = y;
    hi(j) += 1e-6;
    lo(j) -= 1e-6;
    CHECK(g(j) == doctest::Approx((model.density(hi) - model.density(lo)) / 2e-6).epsilon(1e-6));
  }
}

TEST_CASE("Monte-Carlo covariance on a uniform ball") {
  Rng rng(1);
  const auto one = ball_cov_mc(uniform_density(1), origin(1), 1.0, 1000000, rng, 4);
  CHECK(std::abs(one.cov(0, 0) - 1.0 / 3.0) < 0.01 / 3.0);

  const auto two = ball_cov_mc(uniform_density(2), origin(2), 0.1, 1000000, rng, 4);
  CHECK(std::abs(two.cov(0, 0) - 0.0025) < 0.02 * 0.0025);
  CHECK(std::abs(two.cov(1, 1) - 0.0025) < 0.02 * 0.0025);
  CHECK(std::abs(two.cov(0, 1)) < 2e-4);
  CHECK(two.acceptance == doctest::Approx(3.14159265 / 4).epsilon(0.01));
}

TEST_CASE("linear density shrinks the gradient direction") {
  Rng rng(2);
  const auto model = linear_density(2, 5.0);
  const auto est = ball_cov_mc(model, origin(2), 0.2, 1000000, rng, 4);
  CHECK(est.cov(0, 0) < est.cov(1, 1));
  const double gap = est.cov(1, 1) - est.cov(0, 0);
  const double predicted = std::pow(0.2, 4) / 16.0 * 25.0;
  CHECK(std::abs(gap - predicted) < 0.25 * predicted);
}

TEST_CASE("thread count does not change the estimate") {
  Rng a(3), b(3);
  const auto x = ball_cov_mc(uniform_density(3), origin(3), 0.5, 200000, a, 1);
  const auto y = ball_cov_mc(uniform_density(3), origin(3), 0.5, 200000, b, 5);
  CHECK(x.cov == y.cov);
}

TEST_CASE("report on the uniform model is pure noise") {
  Rng rng(4);
  const auto report = asymptotics_report(uniform_density(2), origin(2), {0.4, 0.2, 0.1}, 400000, rng, 4);
  REQUIRE(report.rows.size() == 3);
  for (const auto& row : report.rows) {
    CHECK(row.max_zscore < 3.0);
    CHECK(row.second_theory == 0.0);
  }
}

TEST_CASE("second term scales as delta^4") {
  Rng rng(5);
  const auto model = linear_density(2, 5.0);
  const auto report = asymptotics_report(model, origin(2), {0.2, 0.1}, 2000000, rng, 4);
  REQUIRE(report.second_scaling.size() == 1);
  CHECK(report.second_scaling[0] >= 10.0);
  CHECK(report.second_scaling[0] <= 24.0);
  for (const auto& row : report.rows) {
    CHECK(std::abs(row.second_mc - row.second_theory) < 0.25 * row.second_theory);
    const double ratio = row.second_theory / row.first_norm;
    CHECK(ratio == doctest::Approx(row.delta * row.delta * 25.0 / 4.0));
    CHECK(std::abs(row.second_direction(0)) > 0.99);
  }
}

TEST_CASE("Monte-Carlo error shrinks at the square-root rate") {
  Rng rng(6);
  const auto model = uniform_density(1);
  const Matrixd truth = ball_cov_theory(model, origin(1), 1.0);
  auto rms = [&](Index n) {
    double s = 0;
    const int reps = 40;
    for (int r = 0; r < reps; ++r) {
      const double e = (ball_cov_mc(model, origin(1), 1.0, n, rng).cov - truth).cwiseAbs().maxCoeff();
      s += e * e;
    }
    return std::sqrt(s / reps);
  };
  const double ratio = rms(10000) / rms(40000);
  CHECK(ratio >= 1.6);
  CHECK(ratio <= 2.6);
}

TEST_CASE("errors") {
  Rng rng(7);
  DensityModel thin = uniform_density(2);
  thin.density = [](const Vectord&) { return 1e-9; };
  try {
    ball_cov_mc(thin, origin(2), 0.1, 20000, rng);
    FAIL("expected RejectionStall");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::RejectionStall);
  }
  CHECK_THROWS_AS(ball_cov_mc(uniform_density(2), origin(2), -1.0, 20000, rng), Error);
  CHECK_THROWS_AS(asymptotics_report(uniform_density(2), origin(2), {0.1, 0.2}, 20000, rng), Error);
}

}
