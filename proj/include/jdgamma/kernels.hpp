#pragma once

#include <string>
#include <string_view>

namespace jdgamma {

enum class KernelFamily
{
  GammaAsymmetric,
  GaussianSymmetric
};

std::string_view to_string(KernelFamily family);
KernelFamily parse_kernel_family(std::string_view name);

//! A smoother together with its bandwidth (same units as the state variable).
struct KernelSpec
{
  KernelFamily family = KernelFamily::GammaAsymmetric;
  double bandwidth = 0.0;

  static KernelSpec gamma(double h) { return {KernelFamily::GammaAsymmetric, h}; }
  static KernelSpec gaussian(double h) { return {KernelFamily::GaussianSymmetric, h}; }

  //! Throws DomainError unless h > 0 and finite.
  void validate() const;
};

/// Gamma(x/h + 1, h) density evaluated at u, via log-gamma so that shapes
/// x/h up to 1e6 neither overflow nor underflow. Returns 0 when the
/// log-density falls below the smallest normal double.
/// Throws DomainError for u < 0, x < 0 or h <= 0.
double gamma_kernel(double u, double x, double h);

/// (1/h) phi((x - u)/h). Throws DomainError for h <= 0.
double gaussian_kernel(double u, double x, double h);

struct KernelMoments
{
  double mean;
  double variance;
};

//! Closed-form mean x + h and variance x h + h^2 of K_{G(x/h+1,h)}.
KernelMoments gamma_kernel_moments(double x, double h);

/// Gamma(2k+1) / (2^{2k+1} Gamma(k+1)^2): the boundary-regime variance
/// constant of the Gamma local linear smoother at x = k h.
double boundary_variance_constant(double kappa);

//! 1/(2 sqrt(pi)), the Gaussian-kernel counterpart of the constant above.
inline constexpr double kGaussianVarianceConstant = 0.28209479177387814;

inline constexpr double kDefaultRegimeThreshold = 20.0;

struct PointRegime
{
  enum class Kind
  {
    Interior,
    Boundary
  };
  Kind kind = Kind::Interior;
  double kappa = 0.0; // x/h, meaningful for Boundary only

  static PointRegime interior() { return {Kind::Interior, 0.0}; }
  static PointRegime boundary(double kappa) { return {Kind::Boundary, kappa}; }
  bool is_boundary() const { return kind == Kind::Boundary; }
};

std::string_view to_string(PointRegime::Kind kind);

/// Interior if x/h >= tau, else Boundary with kappa = x/h. The asymptotic
/// theory only defines limits; tau is a finite-sample cutoff.
PointRegime classify_point(double x, double h, double tau = kDefaultRegimeThreshold);

/// Kernel bound to one evaluation point. Caches the Gamma normalizer so a
/// whole sample can be weighted with one log and one exp per observation.
/// Unlike gamma_kernel(), observations outside the Gamma support (u < 0)
/// get weight 0 instead of raising.
class KernelEvaluator
{
public:
  KernelEvaluator(const KernelSpec& spec, double x);

  double operator()(double u) const;

  //! Kernel value at its mode; the reference scale for sparse-region checks.
  double peak() const { return peak_; }
  double x() const { return x_; }
  const KernelSpec& spec() const { return spec_; }

private:
  KernelSpec spec_;
  double x_;
  double shape_ = 0.0;    // x/h
  double log_norm_ = 0.0; // log h + lgamma(x/h + 1)
  double peak_ = 0.0;
};

} // namespace jdgamma
