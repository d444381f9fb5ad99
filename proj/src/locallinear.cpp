#include "jdgamma/locallinear.hpp"

#include "jdgamma/errors.hpp"
#include "jdgamma/summation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace jdgamma {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_lengths(std::span<const double> w, std::span<const double> d, std::size_t r)
{
  if (w.size() != d.size() || d.size() != r)
    throw ArgumentError("weight, design and response sequences differ in length");
  if (d.empty())
    throw ArgumentError("local linear fit needs at least one observation");
}

bool excluded_index(const ExcludedBlock& block, std::size_t i)
{
  return i >= block.begin && i < block.end;
}

} // namespace

std::string_view to_string(FitStatus status)
{
  switch (status) {
    case FitStatus::Ok:
      return "ok";
    case FitStatus::Sparse:
      return "sparse";
    case FitStatus::Degenerate:
      return "degenerate";
    case FitStatus::OutOfDomain:
      return "out_of_domain";
  }
  return "unknown";
}

LocalFit local_linear_fit(std::span<const double> weight_point,
                          std::span<const double> design_point,
                          std::span<const double> response,
                          const KernelSpec& kernel,
                          double x,
                          const FitTolerances& tol,
                          ExcludedBlock excluded)
{
  check_lengths(weight_point, design_point, response.size());
  const KernelEvaluator K(kernel, x);
  const std::size_t n = design_point.size();

  std::vector<double> k(n, 0.0);
  CompensatedSum s0, s1, t0;
  double d_min = std::numeric_limits<double>::infinity();
  double d_max = -d_min;
  for (std::size_t i = 0; i < n; ++i) {
    if (excluded_index(excluded, i))
      continue;
    const double ki = K(weight_point[i]);
    if (ki <= 0.0)
      continue;
    k[i] = ki;
    const double dev = design_point[i] - x;
    s0 += ki;
    s1 += ki * dev;
    t0 += ki * response[i];
    d_min = std::min(d_min, design_point[i]);
    d_max = std::max(d_max, design_point[i]);
  }
  const double mass = s0.value();
  if (!(mass > tol.sparse_floor * K.peak()))
    throw SparseRegionError(x);

  const double mean_dev = s1.value() / mass;
  const double mean_resp = t0.value() / mass;

  CompensatedSum var_acc, cov_acc;
  for (std::size_t i = 0; i < n; ++i) {
    if (k[i] == 0.0)
      continue;
    const double c = design_point[i] - x - mean_dev;
    var_acc += k[i] * c * c;
    cov_acc += k[i] * c * (response[i] - mean_resp);
  }
  const double var = var_acc.value() / mass;
  const double range = d_max - d_min;
  if (!(var > tol.degenerate_floor * range * range) || !(var > 0.0))
    throw DegenerateDesignError(x, "weighted design variance " + std::to_string(var));

  LocalFit fit;
  fit.slope = cov_acc.value() / mass / var;
  fit.intercept = mean_resp - fit.slope * mean_dev;

  // omega_i = K_i [S2 - (d_i - x) S1] = K_i S0 [var + m^2 - (d_i - x) m]
  const double second = var + mean_dev * mean_dev;
  double max_omega = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (k[i] == 0.0)
      continue;
    const double omega = k[i] * mass * (second - (design_point[i] - x) * mean_dev);
    max_omega = std::max(max_omega, std::fabs(omega));
  }
  fit.weight_mass = mass * mass * var;
  fit.effective_n = max_omega > 0.0 ? fit.weight_mass / max_omega : 0.0;
  return fit;
}

LocalFit local_linear_fit(const RegressionTriples& triples,
                          Target target,
                          const KernelSpec& kernel,
                          double x,
                          const FitTolerances& tol)
{
  return local_linear_fit(triples.weight_point, triples.design_point,
                          triples.response(target), kernel, x, tol);
}

std::vector<double> local_linear_weights(std::span<const double> weight_point,
                                         std::span<const double> design_point,
                                         const KernelSpec& kernel,
                                         double x)
{
  check_lengths(weight_point, design_point, design_point.size());
  const KernelEvaluator K(kernel, x);
  const std::size_t n = design_point.size();
  std::vector<double> k(n);
  CompensatedSum s1, s2;
  for (std::size_t i = 0; i < n; ++i) {
    k[i] = K(weight_point[i]);
    const double dev = design_point[i] - x;
    s1 += k[i] * dev;
    s2 += k[i] * dev * dev;
  }
  std::vector<double> omega(n);
  for (std::size_t i = 0; i < n; ++i)
    omega[i] = k[i] * (s2.value() - (design_point[i] - x) * s1.value());
  return omega;
}

CurveEstimate map_local_fits(const RegressionTriples& triples,
                             Target target,
                             const KernelSpec& kernel,
                             std::span<const double> grid,
                             const FitTolerances& tol)
{
  kernel.validate();
  CurveEstimate curve;
  curve.grid.assign(grid.begin(), grid.end());
  curve.values.assign(grid.size(), kNaN);
  curve.slopes.assign(grid.size(), kNaN);
  curve.status.assign(grid.size(), FitStatus::Ok);
  curve.kernel = kernel;
  curve.target = target;

  const auto resp = triples.response(target);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    try {
      const LocalFit fit = local_linear_fit(triples.weight_point, triples.design_point,
                                            resp, kernel, grid[g], tol);
      curve.values[g] = fit.intercept;
      curve.slopes[g] = fit.slope;
    } catch (const SparseRegionError&) {
      curve.status[g] = FitStatus::Sparse;
    } catch (const DegenerateDesignError&) {
      curve.status[g] = FitStatus::Degenerate;
    } catch (const DomainError&) {
      curve.status[g] = FitStatus::OutOfDomain;
    }
    if (curve.status[g] != FitStatus::Ok)
      curve.failures.push_back(g);
  }
  return curve;
}

CurveEstimate estimate_curve(const RegressionTriples& triples,
                             Target target,
                             const KernelSpec& kernel,
                             std::span<const double> grid,
                             const FitTolerances& tol)
{
  CurveEstimate curve = map_local_fits(triples, target, kernel, grid, tol);
  if (!grid.empty() && curve.failures.size() == grid.size())
    throw NumericalError("local linear fit failed at every grid point");
  return curve;
}

CurveEstimate estimate_drift_curve(const RegressionTriples& triples,
                                   const KernelSpec& kernel,
                                   std::span<const double> grid)
{
  return estimate_curve(triples, Target::Drift, kernel, grid);
}

CurveEstimate estimate_m_curve(const RegressionTriples& triples,
                               const KernelSpec& kernel,
                               std::span<const double> grid)
{
  return estimate_curve(triples, Target::CondVariance, kernel, grid);
}

CurveEstimate estimate_moment_curve(const RegressionTriples& triples,
                                    const KernelSpec& kernel,
                                    std::span<const double> grid,
                                    int order)
{
  if (order == 4)
    return estimate_curve(triples, Target::FourthMoment, kernel, grid);
  if (order == 6)
    return estimate_curve(triples, Target::SixthMoment, kernel, grid);
  throw ArgumentError("moment curve order must be 4 or 6");
}

double estimate_density(const ProxySeries& proxy, const KernelSpec& kernel, double x)
{
  if (proxy.values.empty())
    throw ArgumentError("density estimate needs a nonempty series");
  const KernelEvaluator K(kernel, x);
  CompensatedSum acc;
  for (double v : proxy.values)
    acc += K(v);
  return acc.value() / static_cast<double>(proxy.values.size());
}

double estimate_second_derivative(const RegressionTriples& triples,
                                  Target target,
                                  const KernelSpec& pilot,
                                  double x,
                                  const FitTolerances& tol)
{
  pilot.validate();
  const KernelEvaluator K(pilot, x);
  const auto resp = triples.response(target);
  const std::size_t n = triples.size();
  const double scale = pilot.bandwidth;

  std::vector<std::size_t> rows;
  rows.reserve(n);
  std::vector<double> k(n, 0.0);
  double mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    k[i] = K(triples.weight_point[i]);
    if (k[i] > 0.0) {
      rows.push_back(i);
      mass += k[i];
    }
  }
  if (!(mass > tol.sparse_floor * K.peak()))
    throw SparseRegionError(x);
  if (rows.size() < 4)
    throw DegenerateDesignError(x, "local cubic needs at least 4 weighted points");

  // Normalised weights keep the scaled design well conditioned.
  Eigen::MatrixXd A(rows.size(), 4);
  Eigen::VectorXd b(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t i = rows[r];
    const double sw = std::sqrt(k[i] / mass);
    const double z = (triples.design_point[i] - x) / scale;
    A(r, 0) = sw;
    A(r, 1) = sw * z;
    A(r, 2) = sw * z * z;
    A(r, 3) = sw * z * z * z;
    b(r) = sw * resp[i];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-10);
  if (qr.rank() < 4)
    throw DegenerateDesignError(x, "weighted cubic design has rank " +
                                       std::to_string(qr.rank()));
  const Eigen::VectorXd coef = qr.solve(b);
  return 2.0 * coef(2) / (scale * scale);
}

} // namespace jdgamma
