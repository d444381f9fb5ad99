#pragma once

#include "jdgamma/kernels.hpp"
#include "jdgamma/proxy.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace jdgamma {

//! Minimiser (a, b) of the kernel-weighted local linear least squares problem.
struct LocalFit
{
  double intercept = 0.0;
  double slope = 0.0;
  double weight_mass = 0.0; // sum of the local linear weights omega
  double effective_n = 0.0; // weight_mass / max |omega|
};

/// Relative degeneracy floors.
///  - sparse: sum of kernel weights < sparse_floor * kernel peak value
///  - degenerate: weighted design variance < degenerate_floor * (design range)^2
struct FitTolerances
{
  double sparse_floor = 1e-9;
  double degenerate_floor = 1e-12;
};

//! Half-open index range [begin, end) of observations left out of a fit.
struct ExcludedBlock
{
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Local linear fit at x with kernel weights K(weight_point_i) and regressor
/// (design_point_i - x). The intercept equals
///   sum omega_i resp_i / sum omega_i,
///   omega_i = K_i [S2 - (d_i - x) S1],  S_k = sum_j K_j (d_j - x)^k,
/// and is computed from centred compensated moments, which is algebraically
/// the same estimator.
/// Throws SparseRegionError / DegenerateDesignError; DomainError for a
/// Gamma kernel at x < 0.
LocalFit local_linear_fit(std::span<const double> weight_point,
                          std::span<const double> design_point,
                          std::span<const double> response,
                          const KernelSpec& kernel,
                          double x,
                          const FitTolerances& tol = {},
                          ExcludedBlock excluded = {});

LocalFit local_linear_fit(const RegressionTriples& triples,
                          Target target,
                          const KernelSpec& kernel,
                          double x,
                          const FitTolerances& tol = {});

//! The explicit weights omega_i (diagnostics and tests).
std::vector<double> local_linear_weights(std::span<const double> weight_point,
                                         std::span<const double> design_point,
                                         const KernelSpec& kernel,
                                         double x);

enum class FitStatus
{
  Ok,
  Sparse,
  Degenerate,
  OutOfDomain
};

std::string_view to_string(FitStatus status);

struct CurveEstimate
{
  std::vector<double> grid;
  std::vector<double> values; // NaN where the fit failed
  std::vector<double> slopes;
  std::vector<FitStatus> status;
  std::vector<std::size_t> failures;
  KernelSpec kernel;
  Target target = Target::Drift;

  std::size_t size() const { return grid.size(); }
  bool ok(std::size_t i) const { return status[i] == FitStatus::Ok; }
};

/// Maps local_linear_fit over the grid. Point failures are recorded, not
/// thrown; a NumericalError is raised only if every point fails.
/// Variance-type curves are not clipped at zero here.
CurveEstimate estimate_curve(const RegressionTriples& triples,
                             Target target,
                             const KernelSpec& kernel,
                             std::span<const double> grid,
                             const FitTolerances& tol = {});

//! Same as estimate_curve but never throws for point failures, even if all fail.
CurveEstimate map_local_fits(const RegressionTriples& triples,
                             Target target,
                             const KernelSpec& kernel,
                             std::span<const double> grid,
                             const FitTolerances& tol = {});

CurveEstimate estimate_drift_curve(const RegressionTriples& triples,
                                   const KernelSpec& kernel,
                                   std::span<const double> grid);

CurveEstimate estimate_m_curve(const RegressionTriples& triples,
                               const KernelSpec& kernel,
                               std::span<const double> grid);

//! order 4 targets int c^4 f, order 6 targets int c^6 f.
CurveEstimate estimate_moment_curve(const RegressionTriples& triples,
                                    const KernelSpec& kernel,
                                    std::span<const double> grid,
                                    int order);

/// Kernel density estimate (1/n) sum K(X~_i): the Gamma kernel as is,
/// the Gaussian one as (1/(n h)) sum phi((x - X~_i)/h).
double estimate_density(const ProxySeries& proxy, const KernelSpec& kernel, double x);

/// Curvature of the target curve at x from a weighted local cubic fit with
/// the same staggered weights at the pilot bandwidth; returns twice the
/// quadratic coefficient.
double estimate_second_derivative(const RegressionTriples& triples,
                                  Target target,
                                  const KernelSpec& pilot,
                                  double x,
                                  const FitTolerances& tol = {});

inline constexpr double kDefaultPilotFactor = 2.0;

} // namespace jdgamma
