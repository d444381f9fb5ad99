#include "jdgamma/proxy.hpp"

#include "jdgamma/errors.hpp"

#include <cmath>
#include <string>

namespace jdgamma {

namespace {

void require_delta(double delta)
{
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw ArgumentError("sampling interval delta must be positive and finite");
}

void require_finite(std::span<const double> values, const char* what)
{
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!std::isfinite(values[i]))
      throw DataError(std::string(what) + " contains a non-finite value at index " +
                          std::to_string(i),
                      i);
}

void push_responses(RegressionTriples& t, double diff, double delta, double var_factor,
                    double higher_factor)
{
  const double d2 = diff * diff;
  t.drift_resp.push_back(diff / delta);
  t.var_resp.push_back(var_factor * d2 / delta);
  t.m4_resp.push_back(higher_factor * d2 * d2 / delta);
  t.m6_resp.push_back(higher_factor * d2 * d2 * d2 / delta);
}

void reserve_all(RegressionTriples& t, std::size_t count)
{
  t.weight_point.reserve(count);
  t.design_point.reserve(count);
  t.drift_resp.reserve(count);
  t.var_resp.reserve(count);
  t.m4_resp.reserve(count);
  t.m6_resp.reserve(count);
}

} // namespace

std::string_view to_string(Target target)
{
  switch (target) {
    case Target::Drift:
      return "drift";
    case Target::CondVariance:
      return "m2";
    case Target::FourthMoment:
      return "m4";
    case Target::SixthMoment:
      return "m6";
  }
  return "unknown";
}

Target parse_target(std::string_view name)
{
  if (name == "drift" || name == "mu")
    return Target::Drift;
  if (name == "m2" || name == "M" || name == "variance")
    return Target::CondVariance;
  if (name == "m4")
    return Target::FourthMoment;
  if (name == "m6")
    return Target::SixthMoment;
  throw ConfigError("unknown target '" + std::string(name) +
                    "' (expected drift, m2, m4 or m6)");
}

std::span<const double> RegressionTriples::response(Target target) const
{
  switch (target) {
    case Target::Drift:
      return drift_resp;
    case Target::CondVariance:
      return var_resp;
    case Target::FourthMoment:
      return m4_resp;
    case Target::SixthMoment:
      return m6_resp;
  }
  return drift_resp;
}

ProxySeries build_proxy(std::span<const double> levels, double delta)
{
  require_delta(delta);
  if (levels.size() < 2)
    throw DataError("build_proxy needs at least two observations");
  require_finite(levels, "level series");
  ProxySeries p;
  p.delta = delta;
  p.values.reserve(levels.size() - 1);
  for (std::size_t i = 1; i < levels.size(); ++i)
    p.values.push_back((levels[i] - levels[i - 1]) / delta);
  return p;
}

ProxySeries build_log_proxy(std::span<const double> prices, double delta)
{
  require_delta(delta);
  if (prices.size() < 2)
    throw DataError("build_log_proxy needs at least two observations");
  require_finite(prices, "price series");
  for (std::size_t i = 0; i < prices.size(); ++i)
    if (!(prices[i] > 0.0))
      throw DataError("nonpositive price " + std::to_string(prices[i]) + " at row " +
                          std::to_string(i),
                      i);
  ProxySeries p;
  p.delta = delta;
  p.values.reserve(prices.size() - 1);
  for (std::size_t i = 1; i < prices.size(); ++i)
    p.values.push_back((std::log(prices[i]) - std::log(prices[i - 1])) / delta);
  return p;
}

ProxySeries build_proxy_from_returns(std::span<const double> returns, double delta)
{
  require_delta(delta);
  if (returns.empty())
    throw DataError("return series is empty");
  require_finite(returns, "return series");
  ProxySeries p;
  p.delta = delta;
  p.values.reserve(returns.size());
  for (double r : returns)
    p.values.push_back(r / delta);
  return p;
}

RegressionTriples build_regression_triples(const ProxySeries& proxy)
{
  require_delta(proxy.delta);
  const auto& v = proxy.values;
  if (v.size() < 3)
    throw DataError("regression triples need a proxy of length >= 3, got " +
                        std::to_string(v.size()));
  require_finite(v, "proxy series");

  RegressionTriples t;
  t.delta = proxy.delta;
  reserve_all(t, v.size() - 2);
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    t.weight_point.push_back(v[i - 1]);
    t.design_point.push_back(v[i]);
    push_responses(t, v[i + 1] - v[i], proxy.delta, 1.5, 3.0);
  }
  return t;
}

RegressionTriples build_direct_triples(std::span<const double> latent, double delta)
{
  require_delta(delta);
  if (latent.size() < 2)
    throw DataError("direct triples need at least two latent values");
  require_finite(latent, "latent series");

  RegressionTriples t;
  t.delta = delta;
  reserve_all(t, latent.size() - 1);
  for (std::size_t i = 1; i < latent.size(); ++i) {
    t.weight_point.push_back(latent[i - 1]);
    t.design_point.push_back(latent[i - 1]);
    push_responses(t, latent[i] - latent[i - 1], delta, 1.0, 1.0);
  }
  return t;
}

} // namespace jdgamma
