#pragma once

#include "jdgamma/kernels.hpp"
#include "jdgamma/locallinear.hpp"
#include "jdgamma/proxy.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace jdgamma {

enum class BandwidthMethod
{
  RuleOfThumb,
  MseGrid,
  BlockCV,
  AsymptoticPlugIn
};

std::string_view to_string(BandwidthMethod method);

struct ScorePoint
{
  double candidate = 0.0; // c for rule-of-thumb scaled searches, h otherwise
  double h = 0.0;
  double score = 0.0;
  std::size_t failures = 0; // grid points or leave-out fits that failed
};

struct BandwidthChoice
{
  double h = 0.0;
  BandwidthMethod method = BandwidthMethod::RuleOfThumb;
  double c = 0.0;                 // scale constant where one applies
  std::vector<ScorePoint> scores; // empty for one-shot methods
};

//! Sample standard deviation (n - 1 denominator). DataError if zero.
double proxy_std(const ProxySeries& proxy);

/// h = c S T^{-2/5} for interior points, c S T^{-1/5} for boundary points,
/// S the proxy's sample standard deviation.
BandwidthChoice rule_of_thumb(const ProxySeries& proxy,
                              double c,
                              double horizon,
                              PointRegime::Kind regime = PointRegime::Kind::Interior);

//! count log-spaced values over [lo, hi] * reference (ascending).
std::vector<double> default_candidate_grid(double reference,
                                           std::size_t count = 25,
                                           double lo = 0.2,
                                           double hi = 5.0);

//! m points spaced evenly on [lower, upper].
std::vector<double> uniform_grid(double lower, double upper, std::size_t m);

/// m evenly spaced evaluation points between the qlo and qhi sample
/// quantiles of the proxy. For the Gamma kernel the lower end is raised to 0.
std::vector<double> proxy_range_grid(const ProxySeries& proxy,
                                     std::size_t m,
                                     double qlo,
                                     double qhi,
                                     KernelFamily family);

using TruthFunction = std::function<double(double)>;

/// For each c the curve is fitted with h = c S T^{-2/5} and scored by the
/// mean squared error against `truth` over x_grid; failed grid points are
/// left out of the average and counted. Returns the smallest minimiser.
BandwidthChoice mse_grid_search(const TruthFunction& truth,
                                const ProxySeries& proxy,
                                std::span<const double> c_grid,
                                double horizon,
                                std::span<const double> x_grid,
                                KernelFamily family = KernelFamily::GammaAsymmetric,
                                Target target = Target::Drift);

struct BlockCvOptions
{
  std::size_t k = 0; // block half-width; 0 means round(n^{1/4})
  KernelFamily family = KernelFamily::GammaAsymmetric;
  Target target = Target::Drift;

  // Called before every leave-out fit with the prediction index and the
  // excluded block (instrumentation for tests).
  std::function<void(std::size_t, ExcludedBlock)> on_fit;
};

//! round(n^{1/4}).
std::size_t default_block_size(std::size_t n);

/// k-block cross-validation over h_grid. Prediction at triple i uses a fit
/// that omits triples i-k..i+k. A failed leave-out fit contributes the
/// unconditional variance of the responses. For the Gamma kernel,
/// predictions at negative design points are skipped (outside its support).
BandwidthChoice block_cv(const ProxySeries& proxy,
                         std::span<const double> h_grid,
                         const BlockCvOptions& options = {});

/// Plug-in bandwidth minimising the leading-order MSE:
///   interior  h = ( V / (n delta) * 4 / (x curv)^2 )^{2/5},
///             V = M / (2 sqrt(pi) x^{1/2} p)
///   boundary  h = ( B(kappa) M / p / (n delta) * 4 / ((2 + kappa) curv)^2 )^{1/5}
BandwidthChoice asymptotic_h_opt(double x,
                                 std::size_t n,
                                 double delta,
                                 double m_hat,
                                 double p_hat,
                                 double curvature,
                                 PointRegime regime);

} // namespace jdgamma
