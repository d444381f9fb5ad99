#pragma once

#include "jdgamma/kernels.hpp"
#include "jdgamma/locallinear.hpp"
#include "jdgamma/proxy.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace jdgamma {

//! Standard normal quantile.
double normal_quantile(double p);

struct MomentInputs
{
  double x = 0.0;
  double h = 0.0;
  std::size_t n = 0; // observations; n * delta is the time span
  double delta = 0.0;
  Target target = Target::Drift;
  KernelFamily family = KernelFamily::GammaAsymmetric;
  double curvature = 0.0; // second derivative of the target curve at x
  double m_hat = 0.0;     // conditional variance estimate (drift bands)
  double c4_hat = 0.0;    // fourth-moment estimate (variance bands)
  double p_hat = 0.0;     // design density estimate
};

struct AsymptoticMoments
{
  double bias = 0.0;
  double variance = 0.0;
  double rate = 1.0; // studentization factor
  PointRegime regime;

  //! sqrt(variance) / rate: the asymptotic standard error of the estimate.
  double std_error() const;
};

/// Leading bias, variance and rate of the local linear estimator.
///
/// Gamma kernel, interior:  bias = h (x/2) curv,
///   variance = V / (2 sqrt(pi) x^{1/2} p),  rate = sqrt(n delta h^{1/2});
/// Gamma kernel, boundary x = kappa h:  bias = h^2 (2 + kappa)/2 curv,
///   variance = B(kappa) V / p,  rate = sqrt(n delta h);
/// Gaussian kernel (either regime):  bias = h^2/2 curv,
///   variance = V / (2 sqrt(pi) p),  rate = sqrt(n delta h).
/// V is m_hat for drift and c4_hat for the conditional variance.
AsymptoticMoments asymptotic_moments(const MomentInputs& in, PointRegime regime);

//! Per-grid-point plug-in quantities for band construction (NaN = missing).
struct BandCompanions
{
  std::vector<double> m_hat;
  std::vector<double> c4_hat;
  std::vector<double> p_hat;
  std::vector<double> curvature;
};

/// M from the conditional-variance curve, c4 from the order-4 curve,
/// the kernel density of the proxy, and the target's curvature from a local
/// cubic at pilot_factor * h. All use the kernel of the main fit.
BandCompanions estimate_companions(const RegressionTriples& triples,
                                   const ProxySeries& proxy,
                                   const KernelSpec& kernel,
                                   std::span<const double> grid,
                                   Target target,
                                   double pilot_factor = kDefaultPilotFactor);

struct BandOptions
{
  double tau = kDefaultRegimeThreshold;
  std::optional<PointRegime::Kind> forced_regime;
  bool bias_correction = true;
};

struct ConfidenceBand
{
  std::vector<double> grid;
  std::vector<double> estimate;
  std::vector<double> center;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> std_error;
  std::vector<double> bias;
  std::vector<PointRegime> regime;
  std::vector<bool> valid;
  std::vector<bool> clipped;
  // Larger of the interior and boundary standard errors (Gamma kernel, x > 0);
  // flags points where the regime choice matters.
  std::vector<double> guard_std_error;
  double alpha = 0.05;
  Target target = Target::Drift;
  KernelFamily family = KernelFamily::GammaAsymmetric;
  double bandwidth = 0.0;

  std::size_t size() const { return grid.size(); }
  double length(std::size_t i) const { return upper[i] - lower[i]; }
};

/// center = estimate - bias, bounds = center -/+ z_{1-alpha/2} sqrt(variance)/rate.
/// Variance bands are intersected with [0, inf). Points with a failed fit or
/// unusable companions are marked invalid and get NaN bounds.
ConfidenceBand confidence_band(const CurveEstimate& curve,
                               const BandCompanions& companions,
                               double alpha,
                               std::size_t n,
                               double delta,
                               const BandOptions& options = {});

struct JumpComponents
{
  double sigma2 = 0.0;   // diffusion variance
  double lambda = 0.0;   // jump intensity
  double sigma_z2 = 0.0; // jump-size variance
  bool sigma2_valid = true;
  bool lambda_valid = true;
  bool sigma_z2_valid = true;

  bool valid() const { return sigma2_valid && lambda_valid && sigma_z2_valid; }
};

/// Inverts m2 = sigma^2 + lambda sigma_z^2, m4 = 3 lambda sigma_z^4,
/// m6 = 15 lambda sigma_z^6 (zero-mean normal jump sizes).
/// Throws NotIdentifiableError if m4 <= 0 or m6 == 0.
JumpComponents identify_jump_components(double m2, double m4, double m6);

struct JumpTestResult
{
  double statistic = 0.0;
  double realized_variance = 0.0;
  double bipower_variation = 0.0;
  double quadpower = 0.0;
  std::size_t n = 0;
  bool reject_at_5pct = false;
};

inline constexpr double kJumpTestCritical = 1.96;

/// Ratio-form bipower jump test on increments r_1..r_n:
///   RV = sum r^2,  BV = (pi/2) n/(n-1) sum |r_i||r_{i-1}|,
///   QP = n (pi^2/4) n/(n-3) sum |r_i||r_{i-1}||r_{i-2}||r_{i-3}|,
///   stat = (BV/RV - 1) / sqrt(theta max(QP/BV^2, 1) / n),
///   theta = pi^2/4 + pi - 5.
/// Jumps push the statistic negative. Needs n >= 10; RV = 0 is a DataError.
JumpTestResult bs_jump_test(std::span<const double> increments);

//! X~_i - X~_{i-1}: increments of the proxy, where jumps in X show up.
std::vector<double> latent_increments(const ProxySeries& proxy);

//! X~_i * delta: the per-interval changes of the observed level series.
std::vector<double> proxy_returns(const ProxySeries& proxy);

} // namespace jdgamma
