#include "jdgamma/kernels.hpp"

#include "jdgamma/errors.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace jdgamma {

namespace {

const double kLogFloor = std::log(std::numeric_limits<double>::min());

void require_bandwidth(double h)
{
  if (!(h > 0.0) || !std::isfinite(h))
    throw DomainError("kernel bandwidth must be positive and finite, got " +
                      std::to_string(h));
}

double log_gamma(double a)
{
  return boost::math::lgamma(a);
}

// log of u^s e^{-u/h} / (h^{s+1} Gamma(s+1)) with s = x/h, u > 0.
double gamma_log_density(double u, double shape, double h, double log_norm)
{
  const double t = u / h;
  return shape * std::log(t) - t - log_norm;
}

double exp_or_zero(double log_value)
{
  return log_value < kLogFloor ? 0.0 : std::exp(log_value);
}

} // namespace

std::string_view to_string(KernelFamily family)
{
  switch (family) {
    case KernelFamily::GammaAsymmetric:
      return "gamma";
    case KernelFamily::GaussianSymmetric:
      return "gaussian";
  }
  return "unknown";
}

KernelFamily parse_kernel_family(std::string_view name)
{
  if (name == "gamma")
    return KernelFamily::GammaAsymmetric;
  if (name == "gaussian")
    return KernelFamily::GaussianSymmetric;
  throw ConfigError("unknown kernel family '" + std::string(name) +
                    "' (expected gamma or gaussian)");
}

std::string_view to_string(PointRegime::Kind kind)
{
  return kind == PointRegime::Kind::Interior ? "interior" : "boundary";
}

void KernelSpec::validate() const
{
  require_bandwidth(bandwidth);
}

double gamma_kernel(double u, double x, double h)
{
  require_bandwidth(h);
  if (!(u >= 0.0))
    throw DomainError("gamma kernel evaluated at negative u = " + std::to_string(u));
  if (!(x >= 0.0))
    throw DomainError("gamma kernel design point must be nonnegative, got " +
                      std::to_string(x));
  return KernelEvaluator(KernelSpec::gamma(h), x)(u);
}

double gaussian_kernel(double u, double x, double h)
{
  require_bandwidth(h);
  const double z = (x - u) / h;
  return std::exp(-0.5 * z * z) / (h * std::sqrt(2.0 * std::numbers::pi));
}

KernelMoments gamma_kernel_moments(double x, double h)
{
  require_bandwidth(h);
  if (!(x >= 0.0))
    throw DomainError("gamma kernel design point must be nonnegative");
  return {x + h, x * h + h * h};
}

double boundary_variance_constant(double kappa)
{
  if (!(kappa >= 0.0) || !std::isfinite(kappa))
    throw DomainError("kappa must be nonnegative, got " + std::to_string(kappa));
  const double log_value = log_gamma(2.0 * kappa + 1.0) -
                           (2.0 * kappa + 1.0) * std::numbers::ln2 -
                           2.0 * log_gamma(kappa + 1.0);
  return std::exp(log_value);
}

PointRegime classify_point(double x, double h, double tau)
{
  require_bandwidth(h);
  if (!(x >= 0.0))
    throw DomainError("design point must be nonnegative for regime classification");
  if (!(tau > 0.0))
    throw DomainError("regime threshold must be positive");
  const double ratio = x / h;
  if (ratio >= tau)
    return PointRegime::interior();
  return PointRegime::boundary(ratio);
}

KernelEvaluator::KernelEvaluator(const KernelSpec& spec, double x)
  : spec_(spec)
  , x_(x)
{
  spec.validate();
  const double h = spec.bandwidth;
  if (spec.family == KernelFamily::GammaAsymmetric) {
    if (!(x >= 0.0))
      throw DomainError("gamma kernel design point must be nonnegative, got " +
                        std::to_string(x));
    shape_ = x / h;
    log_norm_ = std::log(h) + log_gamma(shape_ + 1.0);
    // Mode of Gamma(shape + 1, h) sits at u = x.
    peak_ = x > 0.0 ? exp_or_zero(gamma_log_density(x, shape_, h, log_norm_)) : 1.0 / h;
  } else {
    peak_ = 1.0 / (h * std::sqrt(2.0 * std::numbers::pi));
  }
}

double KernelEvaluator::operator()(double u) const
{
  const double h = spec_.bandwidth;
  if (spec_.family == KernelFamily::GaussianSymmetric) {
    const double z = (x_ - u) / h;
    return peak_ * std::exp(-0.5 * z * z);
  }
  if (u < 0.0)
    return 0.0;
  if (u == 0.0)
    return shape_ == 0.0 ? 1.0 / h : 0.0;
  return exp_or_zero(gamma_log_density(u, shape_, h, log_norm_));
}

} // namespace jdgamma
