#include "jdgamma/inference.hpp"

#include "jdgamma/errors.hpp"
#include "jdgamma/summation.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace jdgamma {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const double kTwoSqrtPi = 2.0 * std::sqrt(std::numbers::pi);

double scale_input(const MomentInputs& in)
{
  switch (in.target) {
    case Target::Drift:
      if (!(in.m_hat >= 0.0))
        throw DomainError("drift band needs a nonnegative conditional variance estimate");
      return in.m_hat;
    case Target::CondVariance:
      if (!(in.c4_hat >= 0.0))
        throw DomainError("variance band needs a nonnegative fourth-moment estimate");
      return in.c4_hat;
    default:
      throw ArgumentError("asymptotic moments are defined for drift and m2 only");
  }
}

} // namespace

double normal_quantile(double p)
{
  if (!(p > 0.0 && p < 1.0))
    throw ArgumentError("normal quantile needs p in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>{}, p);
}

double AsymptoticMoments::std_error() const
{
  return std::sqrt(variance) / rate;
}

AsymptoticMoments asymptotic_moments(const MomentInputs& in, PointRegime regime)
{
  if (!(in.h > 0.0) || !(in.delta > 0.0) || in.n == 0)
    throw ArgumentError("asymptotic moments need h > 0, delta > 0 and n >= 1");
  if (!(in.p_hat > 0.0))
    throw DomainError("asymptotic moments need a positive density estimate");
  const double v = scale_input(in);
  const double span = static_cast<double>(in.n) * in.delta;

  AsymptoticMoments out;
  out.regime = regime;
  if (in.family == KernelFamily::GaussianSymmetric) {
    out.bias = in.h * in.h / 2.0 * in.curvature;
    out.variance = v / (kTwoSqrtPi * in.p_hat);
    out.rate = std::sqrt(span * in.h);
    return out;
  }
  if (regime.is_boundary()) {
    const double kappa = regime.kappa;
    out.bias = in.h * in.h * (2.0 + kappa) / 2.0 * in.curvature;
    out.variance = boundary_variance_constant(kappa) * v / in.p_hat;
    out.rate = std::sqrt(span * in.h);
  } else {
    if (!(in.x > 0.0))
      throw DomainError("interior asymptotics need x > 0");
    out.bias = in.h * in.x / 2.0 * in.curvature;
    out.variance = v / (kTwoSqrtPi * std::sqrt(in.x) * in.p_hat);
    out.rate = std::sqrt(span * std::sqrt(in.h));
  }
  return out;
}

BandCompanions estimate_companions(const RegressionTriples& triples,
                                   const ProxySeries& proxy,
                                   const KernelSpec& kernel,
                                   std::span<const double> grid,
                                   Target target,
                                   double pilot_factor)
{
  if (!(pilot_factor > 0.0))
    throw ArgumentError("pilot factor must be positive");
  BandCompanions c;
  c.m_hat.assign(grid.size(), kNaN);
  c.c4_hat.assign(grid.size(), kNaN);
  c.p_hat.assign(grid.size(), kNaN);
  c.curvature.assign(grid.size(), kNaN);
  const KernelSpec pilot{kernel.family, pilot_factor * kernel.bandwidth};
  const auto m_resp = triples.response(Target::CondVariance);
  const auto c4_resp = triples.response(Target::FourthMoment);

  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double x = grid[g];
    if (kernel.family == KernelFamily::GammaAsymmetric && x < 0.0)
      continue;
    auto attempt = [&](double& slot, auto&& compute) {
      try {
        slot = compute();
      } catch (const NumericalError&) {
      } catch (const DomainError&) {
      }
    };
    attempt(c.m_hat[g], [&] {
      return local_linear_fit(triples.weight_point, triples.design_point, m_resp, kernel, x)
          .intercept;
    });
    if (target == Target::CondVariance)
      attempt(c.c4_hat[g], [&] {
        return local_linear_fit(triples.weight_point, triples.design_point, c4_resp, kernel, x)
            .intercept;
      });
    attempt(c.p_hat[g], [&] { return estimate_density(proxy, kernel, x); });
    attempt(c.curvature[g],
            [&] { return estimate_second_derivative(triples, target, pilot, x); });
  }
  return c;
}

ConfidenceBand confidence_band(const CurveEstimate& curve,
                               const BandCompanions& companions,
                               double alpha,
                               std::size_t n,
                               double delta,
                               const BandOptions& options)
{
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ArgumentError("confidence level alpha must lie in (0, 1)");
  if (curve.target != Target::Drift && curve.target != Target::CondVariance)
    throw ArgumentError("bands are available for drift and m2 curves only");
  const std::size_t m = curve.size();
  if (companions.m_hat.size() != m || companions.c4_hat.size() != m ||
      companions.p_hat.size() != m || companions.curvature.size() != m)
    throw ArgumentError("companion estimates do not match the curve grid");

  const double z = normal_quantile(1.0 - alpha / 2.0);
  const double h = curve.kernel.bandwidth;
  const bool variance_band = curve.target == Target::CondVariance;

  ConfidenceBand band;
  band.grid = curve.grid;
  band.estimate = curve.values;
  band.center.assign(m, kNaN);
  band.lower.assign(m, kNaN);
  band.upper.assign(m, kNaN);
  band.std_error.assign(m, kNaN);
  band.bias.assign(m, kNaN);
  band.regime.assign(m, PointRegime{});
  band.valid.assign(m, false);
  band.clipped.assign(m, false);
  band.guard_std_error.assign(m, kNaN);
  band.alpha = alpha;
  band.target = curve.target;
  band.family = curve.kernel.family;
  band.bandwidth = h;

  for (std::size_t i = 0; i < m; ++i) {
    const double x = curve.grid[i];
    PointRegime regime = classify_point(std::max(x, 0.0), h, options.tau);
    if (options.forced_regime) {
      regime = *options.forced_regime == PointRegime::Kind::Interior
                   ? PointRegime::interior()
                   : PointRegime::boundary(std::max(x, 0.0) / h);
    }
    band.regime[i] = regime;
    if (!curve.ok(i))
      continue;

    MomentInputs in;
    in.x = x;
    in.h = h;
    in.n = n;
    in.delta = delta;
    in.target = curve.target;
    in.family = curve.kernel.family;
    in.curvature = options.bias_correction ? companions.curvature[i] : 0.0;
    in.m_hat = companions.m_hat[i];
    in.c4_hat = companions.c4_hat[i];
    in.p_hat = companions.p_hat[i];
    if (!std::isfinite(in.curvature))
      continue;

    AsymptoticMoments mom;
    try {
      mom = asymptotic_moments(in, regime);
    } catch (const DomainError&) {
      continue;
    }
    const double se = mom.std_error();
    band.bias[i] = mom.bias;
    band.std_error[i] = se;
    band.center[i] = curve.values[i] - mom.bias;
    band.lower[i] = band.center[i] - z * se;
    band.upper[i] = band.center[i] + z * se;
    band.valid[i] = true;

    if (in.family == KernelFamily::GammaAsymmetric && x > 0.0) {
      try {
        const double se_int = asymptotic_moments(in, PointRegime::interior()).std_error();
        const double se_bnd = asymptotic_moments(in, PointRegime::boundary(x / h)).std_error();
        band.guard_std_error[i] = std::max(se_int, se_bnd);
      } catch (const DomainError&) {
      }
    } else {
      band.guard_std_error[i] = se;
    }

    if (variance_band) {
      if (band.lower[i] < 0.0) {
        band.lower[i] = 0.0;
        band.clipped[i] = true;
      }
      if (band.upper[i] < 0.0) {
        band.upper[i] = 0.0;
        band.clipped[i] = true;
      }
    }
  }
  return band;
}

JumpComponents identify_jump_components(double m2, double m4, double m6)
{
  if (!(m4 > 0.0))
    throw NotIdentifiableError("fourth moment must be positive to identify jumps");
  if (m6 == 0.0 || !std::isfinite(m6))
    throw NotIdentifiableError("sixth moment must be nonzero to identify jumps");
  JumpComponents out;
  out.sigma_z2 = m6 / (5.0 * m4);
  out.lambda = m4 / (3.0 * out.sigma_z2 * out.sigma_z2);
  out.sigma2 = m2 - out.lambda * out.sigma_z2;
  out.sigma_z2_valid = out.sigma_z2 > 0.0;
  out.lambda_valid = out.lambda > 0.0 && out.sigma_z2_valid;
  out.sigma2_valid = out.sigma2 >= 0.0;
  return out;
}

JumpTestResult bs_jump_test(std::span<const double> r)
{
  const std::size_t n = r.size();
  if (n < 10)
    throw DataError("jump test needs at least 10 increments");
  CompensatedSum rv, bv, qp;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(r[i]))
      throw DataError("non-finite increment at index " + std::to_string(i), i);
    rv += r[i] * r[i];
    if (i >= 1)
      bv += std::fabs(r[i]) * std::fabs(r[i - 1]);
    if (i >= 3)
      qp += std::fabs(r[i]) * std::fabs(r[i - 1]) * std::fabs(r[i - 2]) * std::fabs(r[i - 3]);
  }
  const double nd = static_cast<double>(n);
  const double pi = std::numbers::pi;
  JumpTestResult out;
  out.n = n;
  out.realized_variance = rv.value();
  if (!(out.realized_variance > 0.0))
    throw DataError("realized variance is zero; the jump test is undefined");
  out.bipower_variation = pi / 2.0 * nd / (nd - 1.0) * bv.value();
  out.quadpower = nd * pi * pi / 4.0 * nd / (nd - 3.0) * qp.value();
  if (!(out.bipower_variation > 0.0))
    throw DataError("bipower variation is zero; the jump test is undefined");
  const double theta = pi * pi / 4.0 + pi - 5.0;
  const double ratio = out.quadpower / (out.bipower_variation * out.bipower_variation);
  out.statistic = (out.bipower_variation / out.realized_variance - 1.0) /
                  std::sqrt(theta * std::max(ratio, 1.0) / nd);
  out.reject_at_5pct = std::fabs(out.statistic) > kJumpTestCritical;
  return out;
}

std::vector<double> latent_increments(const ProxySeries& proxy)
{
  if (proxy.values.size() < 2)
    throw DataError("increments need at least two proxy values");
  std::vector<double> out(proxy.values.size() - 1);
  for (std::size_t i = 1; i < proxy.values.size(); ++i)
    out[i - 1] = proxy.values[i] - proxy.values[i - 1];
  return out;
}

std::vector<double> proxy_returns(const ProxySeries& proxy)
{
  std::vector<double> out(proxy.values.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = proxy.values[i] * proxy.delta;
  return out;
}

} // namespace jdgamma
