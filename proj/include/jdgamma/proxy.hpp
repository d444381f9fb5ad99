#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace jdgamma {

//! Which infinitesimal moment a regression targets.
enum class Target
{
  Drift,        // mu(x)
  CondVariance, // M(x) = sigma^2(x) + int c^2 f
  FourthMoment, // int c^4 f
  SixthMoment   // int c^6 f
};

std::string_view to_string(Target target);
Target parse_target(std::string_view name);

//! Difference-quotient proxy of the latent process, one value per interval.
struct ProxySeries
{
  double delta = 0.0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double span_time() const { return delta * static_cast<double>(values.size()); }
};

/// Staggered regression data. Entry k corresponds to proxy index i = k + 1
/// (0-based) and holds
///   weight_point = X~_{i-1}   (kernel argument)
///   design_point = X~_i       (local linear regressor)
///   responses built from dX~ = X~_{i+1} - X~_i.
struct RegressionTriples
{
  double delta = 0.0;
  std::vector<double> weight_point;
  std::vector<double> design_point;
  std::vector<double> drift_resp; // dX~ / delta
  std::vector<double> var_resp;   // (3/2) dX~^2 / delta
  std::vector<double> m4_resp;    // 3 dX~^4 / delta
  std::vector<double> m6_resp;    // 3 dX~^6 / delta

  std::size_t size() const { return design_point.size(); }
  std::span<const double> response(Target target) const;
};

//! X~_i = (Y_i - Y_{i-1}) / delta. Needs at least two levels.
ProxySeries build_proxy(std::span<const double> levels, double delta);

//! X~_i = (log P_i - log P_{i-1}) / delta. Nonpositive prices are a DataError.
ProxySeries build_log_proxy(std::span<const double> prices, double delta);

//! X~_i = r_i / delta for already-differenced returns.
ProxySeries build_proxy_from_returns(std::span<const double> returns, double delta);

//! Staggered triples; n - 2 of them for a proxy of length n >= 3.
RegressionTriples build_regression_triples(const ProxySeries& proxy);

/// Regression data for directly observed latent values X_0..X_n:
/// weight and design point both X_{i-1}, responses from X_i - X_{i-1}
/// without the proxy correction factors (3/2 and 3).
RegressionTriples build_direct_triples(std::span<const double> latent, double delta);

} // namespace jdgamma
