#include "jdgamma/bandwidth.hpp"

#include "jdgamma/errors.hpp"
#include "jdgamma/summation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace jdgamma {

namespace {

// Relative plus absolute slack so that scores equal up to rounding tie.
bool strictly_below(double a, double b)
{
  return a < b - (1e-9 * std::fabs(b) + 1e-24);
}

// Index of the smallest score; ties go to the smaller bandwidth.
std::size_t argmin_score(const std::vector<ScorePoint>& scores)
{
  std::size_t best = scores.size();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i].score))
      continue;
    if (best == scores.size() || strictly_below(scores[i].score, scores[best].score) ||
        (!strictly_below(scores[best].score, scores[i].score) && scores[i].h < scores[best].h))
      best = i;
  }
  return best;
}

double sample_quantile(std::vector<double> sorted, double q)
{
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

} // namespace

std::string_view to_string(BandwidthMethod method)
{
  switch (method) {
    case BandwidthMethod::RuleOfThumb:
      return "rule_of_thumb";
    case BandwidthMethod::MseGrid:
      return "mse_grid";
    case BandwidthMethod::BlockCV:
      return "block_cv";
    case BandwidthMethod::AsymptoticPlugIn:
      return "asymptotic";
  }
  return "unknown";
}

double proxy_std(const ProxySeries& proxy)
{
  const auto& v = proxy.values;
  if (v.size() < 2)
    throw DataError("standard deviation needs at least two proxy values");
  CompensatedSum sum;
  for (double x : v)
    sum += x;
  const double mean = sum.value() / static_cast<double>(v.size());
  CompensatedSum ss;
  for (double x : v)
    ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss.value() / static_cast<double>(v.size() - 1));
  if (!(sd > 0.0))
    throw DataError("proxy series has zero variance");
  return sd;
}

BandwidthChoice rule_of_thumb(const ProxySeries& proxy,
                              double c,
                              double horizon,
                              PointRegime::Kind regime)
{
  if (!(c > 0.0))
    throw ArgumentError("rule-of-thumb constant c must be positive");
  if (!(horizon > 0.0))
    throw ArgumentError("time span T must be positive");
  const double exponent = regime == PointRegime::Kind::Interior ? -0.4 : -0.2;
  BandwidthChoice choice;
  choice.method = BandwidthMethod::RuleOfThumb;
  choice.c = c;
  choice.h = c * proxy_std(proxy) * std::pow(horizon, exponent);
  return choice;
}

std::vector<double> default_candidate_grid(double reference, std::size_t count, double lo,
                                           double hi)
{
  if (!(reference > 0.0) || !(lo > 0.0) || !(hi >= lo) || count == 0)
    throw ArgumentError("candidate grid needs reference > 0, 0 < lo <= hi and count >= 1");
  std::vector<double> grid(count);
  if (count == 1) {
    grid[0] = reference * lo;
    return grid;
  }
  const double step = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i)
    grid[i] = reference * lo * std::exp(step * static_cast<double>(i));
  return grid;
}

std::vector<double> uniform_grid(double lower, double upper, std::size_t m)
{
  if (m == 0 || !(upper >= lower))
    throw ArgumentError("uniform grid needs m >= 1 and lower <= upper");
  std::vector<double> grid(m, lower);
  for (std::size_t i = 1; i < m; ++i)
    grid[i] = lower + (upper - lower) * static_cast<double>(i) / static_cast<double>(m - 1);
  return grid;
}

std::vector<double> proxy_range_grid(const ProxySeries& proxy,
                                     std::size_t m,
                                     double qlo,
                                     double qhi,
                                     KernelFamily family)
{
  if (proxy.values.empty())
    throw ArgumentError("evaluation grid needs a nonempty proxy");
  if (!(qlo >= 0.0 && qlo <= qhi && qhi <= 1.0))
    throw ArgumentError("grid quantiles must satisfy 0 <= qlo <= qhi <= 1");
  double lo = sample_quantile(proxy.values, qlo);
  const double hi = sample_quantile(proxy.values, qhi);
  if (family == KernelFamily::GammaAsymmetric)
    lo = std::max(lo, 0.0);
  if (!(hi > lo))
    throw DataError("proxy range offers no room for an evaluation grid");
  return uniform_grid(lo, hi, m);
}

BandwidthChoice mse_grid_search(const TruthFunction& truth,
                                const ProxySeries& proxy,
                                std::span<const double> c_grid,
                                double horizon,
                                std::span<const double> x_grid,
                                KernelFamily family,
                                Target target)
{
  if (!truth)
    throw ArgumentError("MSE grid search needs a truth function");
  if (c_grid.empty() || x_grid.empty())
    throw ArgumentError("MSE grid search needs nonempty c and x grids");
  const double scale = proxy_std(proxy) * std::pow(horizon, -0.4);
  const RegressionTriples triples = build_regression_triples(proxy);

  std::vector<double> truth_values(x_grid.size());
  for (std::size_t k = 0; k < x_grid.size(); ++k)
    truth_values[k] = truth(x_grid[k]);

  BandwidthChoice choice;
  choice.method = BandwidthMethod::MseGrid;
  for (double c : c_grid) {
    if (!(c > 0.0))
      throw ArgumentError("c grid values must be positive");
    ScorePoint sp;
    sp.candidate = c;
    sp.h = c * scale;
    sp.score = std::numeric_limits<double>::quiet_NaN();
    try {
      const CurveEstimate curve = estimate_curve(triples, target, KernelSpec{family, sp.h}, x_grid);
      CompensatedSum se;
      std::size_t used = 0;
      for (std::size_t k = 0; k < curve.size(); ++k) {
        if (!curve.ok(k))
          continue;
        const double e = curve.values[k] - truth_values[k];
        se += e * e;
        ++used;
      }
      sp.failures = x_grid.size() - used;
      sp.score = se.value() / static_cast<double>(used);
    } catch (const NumericalError&) {
      sp.failures = x_grid.size();
    }
    choice.scores.push_back(sp);
  }
  const std::size_t best = argmin_score(choice.scores);
  if (best == choice.scores.size())
    throw NumericalError("every MSE grid candidate failed");
  choice.h = choice.scores[best].h;
  choice.c = choice.scores[best].candidate;
  return choice;
}

std::size_t default_block_size(std::size_t n)
{
  return static_cast<std::size_t>(std::lround(std::pow(static_cast<double>(n), 0.25)));
}

BandwidthChoice block_cv(const ProxySeries& proxy,
                         std::span<const double> h_grid,
                         const BlockCvOptions& options)
{
  if (h_grid.empty())
    throw ArgumentError("block CV needs a nonempty bandwidth grid");
  const std::size_t k = options.k > 0 ? options.k : default_block_size(proxy.size());
  if (proxy.size() < 4 * k + 4)
    throw ArgumentError("series of length " + std::to_string(proxy.size()) +
                        " is too short for block half-width " + std::to_string(k));

  const RegressionTriples triples = build_regression_triples(proxy);
  const auto resp = triples.response(options.target);
  const std::size_t n = triples.size();

  CompensatedSum rs;
  for (double r : resp)
    rs += r;
  const double resp_mean = rs.value() / static_cast<double>(n);
  CompensatedSum rss;
  for (double r : resp)
    rss += (r - resp_mean) * (r - resp_mean);
  const double penalty = rss.value() / static_cast<double>(n);

  BandwidthChoice choice;
  choice.method = BandwidthMethod::BlockCV;
  for (double h : h_grid) {
    const KernelSpec kernel{options.family, h};
    kernel.validate();
    ScorePoint sp;
    sp.candidate = h;
    sp.h = h;
    CompensatedSum cv;
    std::size_t terms = 0;
    for (std::size_t i = k; i + k < n; ++i) {
      const double x = triples.design_point[i];
      if (options.family == KernelFamily::GammaAsymmetric && x < 0.0)
        continue;
      const ExcludedBlock block{i - k, i + k + 1};
      if (options.on_fit)
        options.on_fit(i, block);
      double e2 = penalty;
      try {
        const LocalFit fit = local_linear_fit(triples.weight_point, triples.design_point,
                                              resp, kernel, x, {}, block);
        const double e = resp[i] - fit.intercept;
        e2 = e * e;
      } catch (const NumericalError&) {
        ++sp.failures;
      }
      cv += e2;
      ++terms;
    }
    if (terms == 0)
      throw DataError("no admissible prediction points for block CV");
    sp.score = cv.value() / static_cast<double>(terms);
    choice.scores.push_back(sp);
  }
  const std::size_t best = argmin_score(choice.scores);
  choice.h = choice.scores[best].h;
  return choice;
}

BandwidthChoice asymptotic_h_opt(double x,
                                 std::size_t n,
                                 double delta,
                                 double m_hat,
                                 double p_hat,
                                 double curvature,
                                 PointRegime regime)
{
  if (!(p_hat > 0.0) || !(m_hat > 0.0))
    throw DomainError("plug-in bandwidth needs positive M and density estimates");
  if (!(delta > 0.0) || n == 0)
    throw ArgumentError("plug-in bandwidth needs n >= 1 and delta > 0");
  if (curvature == 0.0 || !std::isfinite(curvature))
    throw NumericalError("plug-in bandwidth is undefined for zero curvature");
  const double span = static_cast<double>(n) * delta;

  BandwidthChoice choice;
  choice.method = BandwidthMethod::AsymptoticPlugIn;
  if (regime.is_boundary()) {
    const double kappa = regime.kappa;
    const double v = boundary_variance_constant(kappa) * m_hat / p_hat;
    const double b = (2.0 + kappa) * curvature;
    choice.h = std::pow(v / span * 4.0 / (b * b), 0.2);
  } else {
    if (!(x > 0.0))
      throw DomainError("interior plug-in bandwidth needs x > 0");
    const double v = m_hat / (2.0 * std::sqrt(std::numbers::pi) * std::sqrt(x) * p_hat);
    const double b = x * curvature;
    choice.h = std::pow(v / span * 4.0 / (b * b), 0.4);
  }
  return choice;
}

} // namespace jdgamma
