#include "jdgamma/errors.hpp"
#include "jdgamma/proxy.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace jdgamma;

TEST_CASE("difference-quotient proxy")
{
  CHECK(build_proxy(std::vector<double>{0, 1, 3}, 1.0).values == std::vector<double>{1, 2});
  CHECK(build_proxy(std::vector<double>{0, 0.5}, 0.5).values == std::vector<double>{1.0});
  const auto flat = build_proxy(std::vector<double>{2, 2, 2, 2}, 0.1);
  for (double v : flat.values)
    CHECK(v == 0.0);
  CHECK(flat.delta == 0.1);
}

TEST_CASE("log-price proxy")
{
  const auto e = build_log_proxy(std::vector<double>{100.0, 100.0 * std::numbers::e}, 1.0);
  CHECK(e.values.at(0) == doctest::Approx(1.0).epsilon(1e-14));
  const auto r = build_log_proxy(std::vector<double>{100.0, 101.0}, 1.0 / 48.0);
  CHECK(r.values.at(0) == doctest::Approx(48.0 * std::log(1.01)).epsilon(1e-13));
  CHECK(r.values.at(0) == doctest::Approx(0.47763).epsilon(1e-5));
  for (double v : build_log_proxy(std::vector<double>{5, 5, 5}, 0.5).values)
    CHECK(v == 0.0);
  CHECK_THROWS_AS(build_log_proxy(std::vector<double>{1.0, 0.0}, 1.0), DataError);
  CHECK_THROWS_AS(build_log_proxy(std::vector<double>{1.0, -2.0}, 1.0), DataError);
}

TEST_CASE("return-based proxy")
{
  const auto p = build_proxy_from_returns(std::vector<double>{0.01, -0.02}, 0.01);
  CHECK(p.values.at(0) == doctest::Approx(1.0));
  CHECK(p.values.at(1) == doctest::Approx(-2.0));
}

TEST_CASE("cumulating then differencing recovers the series")
{
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  const double delta = 0.01;
  std::vector<double> x(300), y{10.0};
  for (auto& v : x) {
    v = z(rng);
    y.push_back(y.back() + v * delta);
  }
  const auto p = build_proxy(y, delta);
  REQUIRE(p.size() == x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(p.values[i] == doctest::Approx(x[i]).epsilon(1e-9).scale(1.0));
}

TEST_CASE("staggered regression triples")
{
  ProxySeries p;
  p.delta = 0.5;
  p.values = {1, 2, 4};
  const auto t = build_regression_triples(p);
  REQUIRE(t.size() == 1);
  CHECK(t.weight_point[0] == 1.0);
  CHECK(t.design_point[0] == 2.0);
  CHECK(t.drift_resp[0] == doctest::Approx(4.0));
  CHECK(t.var_resp[0] == doctest::Approx(12.0));
  CHECK(t.m4_resp[0] == doctest::Approx(96.0));
  CHECK(t.m6_resp[0] == doctest::Approx(384.0));
  CHECK(t.response(Target::CondVariance).data() == t.var_resp.data());
  CHECK(t.response(Target::SixthMoment).data() == t.m6_resp.data());
}

TEST_CASE("triple count and finiteness")
{
  std::mt19937_64 rng(9);
  std::normal_distribution<double> z;
  ProxySeries p;
  p.delta = 0.002;
  for (int i = 0; i < 501; ++i)
    p.values.push_back(z(rng));
  const auto t = build_regression_triples(p);
  CHECK(t.size() == p.size() - 2);
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(std::isfinite(t.drift_resp[i]));
    CHECK(t.var_resp[i] >= 0.0);
    CHECK(t.m4_resp[i] >= 0.0);
    CHECK(t.m6_resp[i] >= 0.0);
  }
}

TEST_CASE("direct triples use the latent values without proxy factors")
{
  const auto t = build_direct_triples(std::vector<double>{1, 2, 4}, 0.5);
  REQUIRE(t.size() == 2);
  CHECK(t.weight_point == t.design_point);
  CHECK(t.design_point[1] == 2.0);
  CHECK(t.drift_resp[1] == doctest::Approx(4.0));
  CHECK(t.var_resp[1] == doctest::Approx(8.0));
  CHECK(t.m4_resp[1] == doctest::Approx(32.0));
}

TEST_CASE("bad inputs are rejected up front")
{
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(build_proxy(std::vector<double>{1, nan, 2}, 1.0), DataError);
  CHECK_THROWS_AS(build_proxy(std::vector<double>{1, 2}, 0.0), ArgumentError);
  CHECK_THROWS_AS(build_proxy(std::vector<double>{1}, 1.0), DataError);
  ProxySeries tiny;
  tiny.delta = 1.0;
  tiny.values = {1, 2};
  CHECK_THROWS(build_regression_triples(tiny));
  CHECK(parse_target("m4") == Target::FourthMoment);
  CHECK_THROWS_AS(parse_target("m5"), ArgumentError);
}
