#include "knnrex/io.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace knnrex;

namespace {

std::string parse_error(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_csv(in, "pts.csv");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ParseError);
    return e.what();
  }
  FAIL("expected ParseError");
  return {};
}

MarginalSpec marginals(const std::string& text, Index total) {
  std::istringstream in(text);
  return parse_marginals(in, {"age", "income"}, total, "m.csv");
}

Errc marginal_code(const std::string& text, Index total) {
  try {
    marginals(text, total);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::BadParams;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("shortest round-trip number formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(3.0) == "3");
  CHECK(format_double(-2.5e-300) == "-2.5e-300");
  Rng rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) / 3.0;
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("CSV parses and round-trips exactly") {
  std::istringstream in("a, b\r\n1,2.5\n\n-3,1e-3\n");
  const Dataset d = parse_csv(in);
  CHECK(d.columns == std::vector<std::string>{"a", "b"});
  REQUIRE(d.points.rows() == 2);
  CHECK(d.points(1, 0) == -3.0);
  CHECK(d.points(1, 1) == 0.001);

  Dataset r;
  r.columns = {"x", "y", "z"};
  r.points = PointSetd(50, 3);
  Rng rng(2);
  std::normal_distribution<double> normal(0.0, 1e3);
  for (Index i = 0; i < r.points.size(); ++i) r.points.data()[i] = normal(rng);
  std::stringstream buf;
  write_csv(buf, r);
  const Dataset back = parse_csv(buf);
  CHECK(back.columns == r.columns);
  CHECK(back.points == r.points);
}

TEST_CASE("CSV errors carry the line number") {
  CHECK(parse_error("a,b\n1,2\n3\n").find("pts.csv:3") != std::string::npos);
  CHECK(parse_error("a,b\n1,2\n3,x\n").find("pts.csv:3") != std::string::npos);
  CHECK(parse_error("a,b\n1,2,\n").find("pts.csv:2") != std::string::npos);
  CHECK(parse_error("").find("header") != std::string::npos);
  CHECK_THROWS_AS(read_csv("/nonexistent/file.csv"), Error);
}

TEST_CASE("marginal files") {
  const auto spec = marginals(
      "variable,lo,hi,freq\n"
      "income,0,10,3\n"
      "age,20,40,4\n"
      "age,0,20,6\n"
      "income,10,20,7\n",
      10);
  REQUIRE(spec.variables.size() == 2);
  const auto& income = spec.variables[0];
  CHECK(income.name == "income");
  CHECK(income.column == 1);
  CHECK(income.edges == std::vector<double>{0, 10, 20});
  CHECK(income.freq == std::vector<Index>{3, 7});
  const auto& age = spec.variables[1];
  CHECK(age.column == 0);
  CHECK(age.edges == std::vector<double>{0, 20, 40});
  CHECK(age.freq == std::vector<Index>{6, 4});

  CHECK(marginal_code("variable,lo,hi,freq\nage,0,10,3\nage,11,20,7\n", 10) == Errc::InconsistentMarginals);
  CHECK(marginal_code("variable,lo,hi,freq\nage,0,10,3\nage,10,20,6\n", 10) == Errc::InconsistentMarginals);
  CHECK(marginal_code("variable,lo,hi,freq\nheight,0,10,10\n", 10) == Errc::InconsistentMarginals);
  CHECK(marginal_code("variable,lo,hi,freq\nage,5,5,10\n", 10) == Errc::InconsistentMarginals);
  CHECK(marginal_code("var,lo,hi,freq\nage,0,10,10\n", 10) == Errc::ParseError);
  CHECK(marginal_code("variable,lo,hi,freq\nage,0,10,2.5\n", 10) == Errc::ParseError);
  CHECK(marginal_code("variable,lo,hi,freq\nage,0,10\n", 10) == Errc::ParseError);
}

TEST_CASE("mixture JSON") {
  const auto spec = parse_gmm_json(R"({"weights": [0.25, 0.75],
      "means": [[0, 1], [2, 3]],
      "covariances": [[[1, 0], [0, 1]], [[2, 0.5], [0.5, 1]]]})");
  CHECK(spec.weights == std::vector<double>{0.25, 0.75});
  CHECK(spec.means[1](1) == 3.0);
  CHECK(spec.covariances[1](0, 1) == 0.5);

  auto code = [](const std::string& text) {
    try {
      parse_gmm_json(text);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::ParseError;
  };
  CHECK(code("{not json") == Errc::BadSpec);
  CHECK(code(R"({"weights": [1]})") == Errc::BadSpec);
  CHECK(code(R"({"weights": [1], "means": [[0]], "covariances": [[[1, 2]]]})") == Errc::BadSpec);
  CHECK(code(R"({"weights": [0.5], "means": [[0]], "covariances": [[[1]]]})") == Errc::BadSpec);
}

TEST_CASE("report text") {
  Report r;
  r.section("config").set("method", std::string("knn-rex")).set("k", Index(12)).set("h", 0.25);
  r.section("folds").table({"fold", "hellinger"}, {{"0", "0.5"}, {"1", "0.25"}});
  CHECK(r.str() ==
        "[config]\nmethod = knn-rex\nk = 12\nh = 0.25\n\n[folds]\nfold,hellinger\n0,0.5\n1,0.25\n");
}

}
