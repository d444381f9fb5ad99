#pragma once

#include "jdgamma/inference.hpp"
#include "jdgamma/kernels.hpp"
#include "jdgamma/proxy.hpp"
#include "jdgamma/simulate.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace jdgamma {

struct McConfig
{
  ModelSpec model = ModelSpec::baseline();
  double horizon = 10.0;
  std::size_t n = 1000;
  std::size_t replicates = 200;
  std::vector<KernelFamily> families{KernelFamily::GammaAsymmetric,
                                     KernelFamily::GaussianSymmetric};

  // Fixed bandwidths. When empty, the MSE experiment uses the per-replicate
  // rule of thumb h = rule_c * S * T^{-2/5}.
  std::vector<double> bandwidths;
  double rule_c = 2.8;

  std::vector<double> eval_points; // coverage and adjusted-length experiments

  // MSE evaluation grid: mse_grid_points evenly spaced between these sample
  // quantiles of each replicate's proxy, cut at 0 (shared by both kernels).
  std::size_t mse_grid_points = 50;
  double grid_qlo = 0.0;
  double grid_qhi = 1.0;

  Target target = Target::Drift;
  std::uint64_t base_seed = 20240601;
  double alpha = 0.05;
  std::size_t substeps = 1;
  std::size_t threads = 1;
  BandOptions band;
  // Bias correction from the model's exact second derivative (zero for the
  // linear drift, 2*b1 for m2) instead of the pilot estimate.
  bool true_curvature = false;
  double pilot_factor = kDefaultPilotFactor;

  void validate() const;
};

struct McCell
{
  KernelFamily family = KernelFamily::GammaAsymmetric;
  double h = 0.0; // fixed bandwidth, or the mean rule-of-thumb bandwidth
  double x = 0.0; // evaluation point; NaN for MSE cells
  std::size_t replicates = 0;
  std::size_t failures = 0; // replicates excluded from the aggregates

  double mse = 0.0;
  double coverage = 0.0; // percent
  double mean_bias = 0.0;
  double estimate_variance = 0.0;
  double mean_est_variance = 0.0; // mean of se^2
  double sd_est_variance = 0.0;
  double mean_length = 0.0;
  double length_ratio = 0.0; // Gaussian / Gamma length at the same (h, x)

  // Adjusted-length experiment.
  double quantile_lo = 0.0;
  double quantile_hi = 0.0;
  double adjusted_length = 0.0;
  double adjusted_coverage = 0.0;
  double adjusted_ratio = 0.0;

  // Replicate-level values, NaN for failed replicates.
  std::vector<double> estimates;
  std::vector<double> std_errors;
  std::vector<double> studentized;
};

struct McReport
{
  std::string experiment;
  McConfig config;
  std::vector<McCell> cells;
};

/// Mean integrated squared error of drift (or m2) curves per kernel, over
/// replicates r with seeds stream_seed(base_seed, r).
McReport run_mse_experiment(const McConfig& cfg);

//! Coverage, bias, variance and band length at each (kernel, h, x).
McReport run_coverage_experiment(const McConfig& cfg);

/// Studentized errors (estimate - truth - bias) / se, their empirical 2.5%
/// and 97.5% quantiles, and band lengths rebuilt with those critical values.
/// Refuses fewer than 40 replicates.
McReport run_adjusted_length_experiment(const McConfig& cfg);

struct AdjustedCritical
{
  double lo = 0.0;
  double hi = 0.0;
  double mean_length = 0.0;
  double coverage = 0.0; // percent of studentized values inside [lo, hi]
};

/// Type-7 (linear interpolation) quantiles of the studentized errors at
/// alpha/2 and 1 - alpha/2; lengths are (hi - lo) * se per replicate.
AdjustedCritical adjust_critical_values(std::span<const double> studentized,
                                        std::span<const double> std_errors,
                                        double alpha);

//! Percent of bands [lower_r, upper_r] containing truth; NaN bounds are skipped.
double coverage_percent(std::span<const double> lower, std::span<const double> upper,
                        double truth);

//! Type-7 sample quantile.
double sample_quantile(std::span<const double> values, double p);

/// Standardized sorted values paired with normal quantiles at (i - 0.5)/R.
/// Needs at least 40 values; zero spread is a NumericalError.
std::vector<std::pair<double, double>> qq_data(std::span<const double> values);

//! Pearson correlation of the QQ pairs.
double qq_correlation(std::span<const std::pair<double, double>> pairs);

/// Evaluates fn(r) for r in [0, count) on `threads` workers and returns the
/// results in index order.
template <class Result, class Fn>
std::vector<Result> parallel_replicates(std::size_t count, std::size_t threads, Fn&& fn);

void write_report_csv(const McReport& report, std::ostream& out);
void write_report_json(const McReport& report, std::ostream& out);

} // namespace jdgamma

#include "jdgamma/detail/parallel.hpp"
