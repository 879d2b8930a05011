#include "knnrex/evaluation.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace knnrex;

namespace {

PointSetd column(std::initializer_list<double> values) {
  PointSetd x(static_cast<Index>(values.size()), 1);
  Index i = 0;
  for (double v : values) x(i++, 0) = v;
  return x;
}

// Dense reference: every bin of the full grid, counted by brute force.
double dense_hellinger(const PointSetd& y, const PointSetd& z, const BinningSpec& b) {
  std::map<std::vector<Index>, std::pair<double, double>> cells;
  auto key_of = [&](const auto& row) {
    std::vector<Index> key;
    for (Index j = 0; j < b.dims(); ++j) {
      const auto& e = b.edges[static_cast<std::size_t>(j)];
      Index bin = 0;
      while (bin + 1 < b.bins(j) && row(j) >= e[static_cast<std::size_t>(bin) + 1]) ++bin;
      key.push_back(bin);
    }
    return key;
  };
  for (Index i = 0; i < y.rows(); ++i) cells[key_of(y.row(i))].first += 1.0 / y.rows();
  for (Index i = 0; i < z.rows(); ++i) cells[key_of(z.row(i))].second += 1.0 / z.rows();
  double s = 0;
  for (const auto& [key, pq] : cells) {
    const double d = std::sqrt(pq.first) - std::sqrt(pq.second);
    s += d * d;
  }
  return std::sqrt(0.5 * s);
}

PointSetd gaussian_cloud(Index n, Index d, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  PointSetd x(n, d);
  for (Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
  return x;
}

}  // namespace

TEST_SUITE("evaluation") {

TEST_CASE("equal-width edges and clamping") {
  const auto b = make_binning(column({0, 10}), 5);
  REQUIRE(b.bins(0) == 5);
  CHECK(b.edges[0][1] == doctest::Approx(2.0));
  CHECK(b.edges[0].back() == 10.0);
  CHECK(b.bin_index(0, 0.0) == 0);
  CHECK(b.bin_index(0, 2.0) == 1);
  CHECK(b.bin_index(0, 10.0) == 4);
  CHECK(b.bin_index(0, -5.0) == 0);
  CHECK(b.bin_index(0, 50.0) == 4);

  const auto c = make_binning(column({3, 3, 3}), 10);
  CHECK(c.bins(0) == 1);
  CHECK(c.bin_index(0, 3.0) == 0);

  const auto u = make_binning(column({0, 1}), column({4}), 4);
  CHECK(u.edges[0].front() == 0.0);
  CHECK(u.edges[0].back() == 4.0);

  CHECK_THROWS_AS(make_binning(PointSetd(0, 1), 3), Error);
}

TEST_CASE("hand-computed distances") {
  const PointSetd y = column({0, 0, 1, 1});
  const PointSetd z = column({0, 1, 1, 1});
  const auto b = make_binning(y, z, 2);
  CHECK(hellinger(y, y, b) == 0.0);
  CHECK(std::abs(hellinger(y, z, b) - 0.18459191128251451) < 1e-12);

  const PointSetd far = column({5, 5});
  const PointSetd near = column({0, 0, 0});
  CHECK(hellinger(far, near, make_binning(far, near, 10)) == doctest::Approx(1.0));
  CHECK(hellinger(far, near, make_binning(far, near, 1)) == 0.0);
  CHECK_THROWS_AS(hellinger(PointSetd(0, 1), near, make_binning(near, 2)), Error);
}

TEST_CASE("agrees with a dense reference and is a symmetric bounded distance") {
  Rng rng(1);
  std::uniform_int_distribution<Index> size(1, 200), dim(1, 4), bins(1, 12);
  for (int trial = 0; trial < 100; ++trial) {
    const Index d = dim(rng);
    const PointSetd y = gaussian_cloud(size(rng), d, 1000 + trial);
    PointSetd z = gaussian_cloud(size(rng), d, 5000 + trial);
    z.array() += 0.3 * (trial % 3);
    const auto b = make_binning(y, z, bins(rng));
    const double h = hellinger(y, z, b);
    CHECK(h >= 0.0);
    CHECK(h <= 1.0);
    CHECK(h == doctest::Approx(hellinger(z, y, b)).epsilon(1e-12));
    CHECK(std::abs(h - dense_hellinger(y, z, b)) < 1e-12);
  }
}

TEST_CASE("histogram is sparse and sorted") {
  PointSetd x(4, 2);
  x << 0, 0, 1, 1, 1, 1, 0, 1;
  const auto h = histogram(x, make_binning(x, 2));
  REQUIRE(h.size() == 3);
  CHECK(h[0].first == BinKey{0, 0});
  CHECK(h[1].first == BinKey{0, 1});
  CHECK(h[2].first == BinKey{1, 1});
  CHECK(h[2].second == 2);
}

TEST_CASE("inverted cross-validation bookkeeping") {
  const PointSetd data = gaussian_cloud(1037, 2, 7);
  EstimatorConfig cfg;
  cfg.k = 5;
  cfg.m = 3;
  cfg.seed = 3;
  const auto r = icv_run(data, cfg, 10, 6);
  CHECK(r.n_total == 1037);
  CHECK(r.n_used == 1030);
  CHECK(r.train_size == 103);
  CHECK(r.synth_size == 927);
  REQUIRE(r.hellinger.size() == 10);
  REQUIRE(r.baseline.size() == 10);
  const auto [mean, sd] = mean_stddev(r.hellinger);
  CHECK(r.mean == mean);
  CHECK(r.stddev == sd);
  for (double h : r.hellinger) CHECK((h >= 0 && h <= 1));

  cfg.threads = 3;
  const auto again = icv_run(data, cfg, 10, 6);
  CHECK(again.hellinger == r.hellinger);
  CHECK(again.baseline == r.baseline);

  cfg.seed = 4;
  CHECK(icv_run(data, cfg, 10, 6).hellinger != r.hellinger);

  try {
    icv_run(gaussian_cloud(5, 2, 1), cfg, 10, 6);
    FAIL("expected TooFewPoints");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::TooFewPoints);
  }
  cfg.method = Method::KnnRexCorrected;
  CHECK_THROWS_AS(icv_run(data, cfg, 10, 6), Error);
}

TEST_CASE("sample mean and standard deviation") {
  const auto [m, s] = mean_stddev({1, 2, 3, 4});
  CHECK(m == 2.5);
  CHECK(s == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(mean_stddev({}).first == 0.0);
  CHECK(mean_stddev({7}).second == 0.0);
}

TEST_CASE("Welch test") {
  const auto same = welch_t(0.5, 0.2, 10, 0.5, 0.2, 10);
  CHECK(same.t == 0.0);
  CHECK(same.dof == doctest::Approx(18));
  CHECK(same.p == doctest::Approx(1.0));

  const auto w = welch_t(1.0, 1.0, 100, 2.0, 1.0, 100);
  CHECK(w.t == doctest::Approx(-7.0710678118654755).epsilon(1e-12));
  CHECK(w.dof == doctest::Approx(198).epsilon(1e-12));
  CHECK(std::abs(w.p - 2.5806165219366507e-11) < 1e-6 * 2.58e-11);

  try {
    welch_t(1, 0, 5, 2, 0, 5);
    FAIL("expected DegenerateVariance");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DegenerateVariance);
  }
  CHECK_THROWS_AS(welch_t(1, 1, 1, 2, 1, 5), Error);
}

TEST_CASE("Welch p-values at Student t quantiles") {
  struct Case {
    double dof, q975, q995;
  };
  // t quantiles from an independent statistics library.
  const Case cases[] = {{1, 12.706204736432095, 63.656741162873992},
                        {10, 2.2281388519649385, 3.16927267261695},
                        {100, 1.9839715184496334, 2.6258905214380177}};
  for (const auto& c : cases) {
    CAPTURE(c.dof);
    for (auto [q, p] : {std::pair{c.q975, 0.05}, std::pair{c.q995, 0.01}}) {
      WelchResult r;
      if (c.dof == 1) {
        // n_a = 2 with sd_b = 0 gives exactly one degree of freedom.
        r = welch_t(q * std::sqrt(0.5), 1.0, 2, 0.0, 0.0, 50);
      } else {
        const Index n = static_cast<Index>(c.dof / 2) + 1;
        const double se = std::sqrt(2.0 / static_cast<double>(n));
        r = welch_t(q * se, 1.0, n, 0.0, 1.0, n);
      }
      CHECK(r.dof == doctest::Approx(c.dof).epsilon(1e-12));
      CHECK(std::abs(r.p - p) < 1e-6);
    }
  }
}

}
