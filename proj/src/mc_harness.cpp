#include "jdgamma/mc_harness.hpp"

#include "jdgamma/bandwidth.hpp"
#include "jdgamma/csv.hpp"
#include "jdgamma/errors.hpp"
#include "jdgamma/locallinear.hpp"
#include "jdgamma/rng.hpp"
#include "jdgamma/summation.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <thread>

namespace jdgamma {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::function<double(double)> truth_function(const McConfig& cfg)
{
  const ModelSpec model = cfg.model;
  const double horizon = cfg.horizon;
  switch (cfg.target) {
    case Target::Drift:
      return [model](double x) { return model.drift(x); };
    case Target::CondVariance:
      return [model, horizon](double x) { return true_moments(model, horizon, x).m2; };
    case Target::FourthMoment:
      return [model, horizon](double x) { return true_moments(model, horizon, x).c4; };
    case Target::SixthMoment:
      return [model, horizon](double x) { return true_moments(model, horizon, x).c6; };
  }
  return {};
}

std::size_t worker_count(const McConfig& cfg)
{
  if (cfg.threads > 0)
    return cfg.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

struct Replicate
{
  ProxySeries proxy;
  RegressionTriples triples;
};

Replicate simulate_replicate(const McConfig& cfg, std::size_t r)
{
  SimulationOptions opts;
  opts.substeps = cfg.substeps;
  const SamplePath path =
      simulate_path(cfg.model, cfg.horizon, cfg.n, stream_seed(cfg.base_seed, r), opts);
  Replicate rep;
  rep.proxy = build_proxy(path.y, path.delta);
  rep.triples = build_regression_triples(rep.proxy);
  return rep;
}

struct Moments
{
  double mean = kNaN;
  double variance = kNaN; // n - 1 denominator
  std::size_t count = 0;
};

Moments finite_moments(std::span<const double> v)
{
  Moments m;
  CompensatedSum s;
  for (double x : v)
    if (std::isfinite(x)) {
      s += x;
      ++m.count;
    }
  if (m.count == 0)
    return m;
  m.mean = s.value() / static_cast<double>(m.count);
  if (m.count < 2) {
    m.variance = 0.0;
    return m;
  }
  CompensatedSum ss;
  for (double x : v)
    if (std::isfinite(x))
      ss += (x - m.mean) * (x - m.mean);
  m.variance = ss.value() / static_cast<double>(m.count - 1);
  return m;
}

// Points the two kernels' cells at each other to fill in length ratios.
void fill_ratios(std::vector<McCell>& cells, bool adjusted)
{
  for (auto& gamma : cells) {
    if (gamma.family != KernelFamily::GammaAsymmetric)
      continue;
    for (auto& gauss : cells) {
      if (gauss.family != KernelFamily::GaussianSymmetric || gauss.h != gamma.h)
        continue;
      if (!(gauss.x == gamma.x || (std::isnan(gauss.x) && std::isnan(gamma.x))))
        continue;
      if (adjusted) {
        if (gamma.adjusted_length > 0.0 && gauss.adjusted_length > 0.0)
          gamma.adjusted_ratio = gauss.adjusted_ratio =
              gauss.adjusted_length / gamma.adjusted_length;
      } else if (gamma.mean_length > 0.0 && gauss.mean_length > 0.0) {
        gamma.length_ratio = gauss.length_ratio = gauss.mean_length / gamma.mean_length;
      }
    }
  }
}

struct PointResult
{
  double estimate = kNaN;
  double bias = kNaN;
  double se = kNaN;
  double lower = kNaN;
  double upper = kNaN;
};

// Second derivative of the target curve under the simulation model.
double true_curvature(const McConfig& cfg)
{
  return cfg.target == Target::CondVariance ? 2.0 * cfg.model.b1 : 0.0;
}

McReport band_experiment(const McConfig& cfg, const std::string& name)
{
  cfg.validate();
  if (cfg.bandwidths.empty() || cfg.eval_points.empty())
    throw ConfigError(name + " needs fixed bandwidths and evaluation points");
  if (cfg.target != Target::Drift && cfg.target != Target::CondVariance)
    throw ConfigError("bands are available for drift and m2 only");
  const auto truth = truth_function(cfg);
  const std::size_t F = cfg.families.size();
  const std::size_t H = cfg.bandwidths.size();
  const std::size_t X = cfg.eval_points.size();
  const auto slot = [&](std::size_t f, std::size_t b, std::size_t k) {
    return (f * H + b) * X + k;
  };

  auto run_one = [&](std::size_t r) {
    std::vector<PointResult> out(F * H * X);
    const Replicate rep = simulate_replicate(cfg, r);
    for (std::size_t f = 0; f < F; ++f)
      for (std::size_t b = 0; b < H; ++b) {
        const KernelSpec kernel{cfg.families[f], cfg.bandwidths[b]};
        try {
          const CurveEstimate curve =
              estimate_curve(rep.triples, cfg.target, kernel, cfg.eval_points);
          BandCompanions comp = estimate_companions(
              rep.triples, rep.proxy, kernel, cfg.eval_points, cfg.target, cfg.pilot_factor);
          if (cfg.true_curvature)
            comp.curvature.assign(X, true_curvature(cfg));
          const ConfidenceBand band = confidence_band(curve, comp, cfg.alpha, rep.proxy.size(),
                                                      rep.proxy.delta, cfg.band);
          for (std::size_t k = 0; k < X; ++k) {
            if (!band.valid[k])
              continue;
            auto& p = out[slot(f, b, k)];
            p.estimate = band.estimate[k];
            p.bias = band.bias[k];
            p.se = band.std_error[k];
            p.lower = band.lower[k];
            p.upper = band.upper[k];
          }
        } catch (const NumericalError&) {
          // every grid point failed: the replicate counts as a failure
        }
      }
    return out;
  };
  const auto results =
      parallel_replicates<std::vector<PointResult>>(cfg.replicates, worker_count(cfg), run_one);

  McReport report;
  report.experiment = name;
  report.config = cfg;
  for (std::size_t f = 0; f < F; ++f)
    for (std::size_t b = 0; b < H; ++b)
      for (std::size_t k = 0; k < X; ++k) {
        McCell cell;
        cell.family = cfg.families[f];
        cell.h = cfg.bandwidths[b];
        cell.x = cfg.eval_points[k];
        cell.replicates = cfg.replicates;
        const double tv = truth(cell.x);
        std::vector<double> lower, upper, errors, se2, lengths;
        for (std::size_t r = 0; r < cfg.replicates; ++r) {
          const PointResult& p = results[r][slot(f, b, k)];
          cell.estimates.push_back(p.estimate);
          cell.std_errors.push_back(p.se);
          const bool ok = std::isfinite(p.estimate) && std::isfinite(p.se);
          cell.studentized.push_back(ok && p.se > 0.0 ? (p.estimate - tv - p.bias) / p.se : kNaN);
          if (!ok) {
            ++cell.failures;
            continue;
          }
          lower.push_back(p.lower);
          upper.push_back(p.upper);
          errors.push_back(p.estimate - tv);
          se2.push_back(p.se * p.se);
          lengths.push_back(p.upper - p.lower);
        }
        if (!errors.empty()) {
          cell.coverage = coverage_percent(lower, upper, tv);
          const Moments err = finite_moments(errors);
          cell.mean_bias = err.mean;
          cell.estimate_variance = err.variance;
          const Moments v = finite_moments(se2);
          cell.mean_est_variance = v.mean;
          cell.sd_est_variance = std::sqrt(v.variance);
          cell.mean_length = finite_moments(lengths).mean;
          cell.mse = err.variance * static_cast<double>(err.count - 1) /
                         static_cast<double>(err.count) +
                     err.mean * err.mean;
        } else {
          cell.coverage = cell.mean_bias = cell.estimate_variance = kNaN;
          cell.mean_est_variance = cell.sd_est_variance = cell.mean_length = cell.mse = kNaN;
        }
        report.cells.push_back(std::move(cell));
      }
  fill_ratios(report.cells, false);
  return report;
}

nlohmann::json config_json(const McConfig& cfg)
{
  using nlohmann::json;
  json families = json::array();
  for (auto f : cfg.families)
    families.push_back(std::string(to_string(f)));
  return json{
      {"model",
       {{"a0", cfg.model.a0},
        {"a1", cfg.model.a1},
        {"b0", cfg.model.b0},
        {"b1", cfg.model.b1},
        {"expected_jumps", cfg.model.jumps.expected_total},
        {"jump_std", cfg.model.jumps.size_std},
        {"jump_mean", cfg.model.jumps.size_mean},
        {"x0", cfg.model.x0},
        {"y0", cfg.model.y0}}},
      {"horizon", cfg.horizon},
      {"n", cfg.n},
      {"replicates", cfg.replicates},
      {"families", families},
      {"bandwidths", cfg.bandwidths},
      {"rule_c", cfg.rule_c},
      {"eval_points", cfg.eval_points},
      {"mse_grid_points", cfg.mse_grid_points},
      {"grid_quantiles", {cfg.grid_qlo, cfg.grid_qhi}},
      {"target", std::string(to_string(cfg.target))},
      {"base_seed", cfg.base_seed},
      {"alpha", cfg.alpha},
      {"substeps", cfg.substeps},
      {"regime_threshold", cfg.band.tau},
      {"forced_regime",
       cfg.band.forced_regime ? std::string(to_string(*cfg.band.forced_regime)) : "none"},
      {"bias_correction", cfg.band.bias_correction},
      {"true_curvature", cfg.true_curvature},
      {"pilot_factor", cfg.pilot_factor},
  };
}

nlohmann::json number_or_null(double v)
{
  if (std::isfinite(v))
    return v;
  return nullptr;
}

nlohmann::json numbers_or_null(const std::vector<double>& values)
{
  auto arr = nlohmann::json::array();
  for (double v : values)
    arr.push_back(number_or_null(v));
  return arr;
}

} // namespace

void McConfig::validate() const
{
  model.validate();
  if (!(horizon > 0.0) || n < 3)
    throw ConfigError("Monte Carlo config needs T > 0 and n >= 3");
  if (replicates == 0)
    throw ConfigError("Monte Carlo config needs at least one replicate");
  if (families.empty())
    throw ConfigError("Monte Carlo config needs at least one kernel family");
  for (double h : bandwidths)
    if (!(h > 0.0))
      throw ConfigError("bandwidths must be positive");
  if (!(rule_c > 0.0))
    throw ConfigError("rule-of-thumb constant must be positive");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ConfigError("alpha must lie in (0, 1)");
  if (substeps == 0)
    throw ConfigError("substeps must be at least 1");
  if (mse_grid_points < 2)
    throw ConfigError("MSE grid needs at least 2 points");
  if (!(grid_qlo >= 0.0 && grid_qlo < grid_qhi && grid_qhi <= 1.0))
    throw ConfigError("grid quantiles must satisfy 0 <= lo < hi <= 1");
}

McReport run_mse_experiment(const McConfig& cfg)
{
  cfg.validate();
  const auto truth = truth_function(cfg);
  const std::size_t F = cfg.families.size();
  const bool rule = cfg.bandwidths.empty();
  const std::size_t H = rule ? 1 : cfg.bandwidths.size();

  struct Row
  {
    std::vector<double> mse; // F * H
    std::vector<double> h;   // H
  };
  auto run_one = [&](std::size_t r) {
    Row row;
    row.mse.assign(F * H, kNaN);
    row.h.assign(H, kNaN);
    const Replicate rep = simulate_replicate(cfg, r);
    std::vector<double> grid;
    try {
      grid = proxy_range_grid(rep.proxy, cfg.mse_grid_points, cfg.grid_qlo, cfg.grid_qhi,
                              KernelFamily::GammaAsymmetric);
    } catch (const DataError&) {
      return row;
    }
    std::vector<double> tv(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k)
      tv[k] = truth(grid[k]);
    for (std::size_t b = 0; b < H; ++b) {
      row.h[b] = rule ? rule_of_thumb(rep.proxy, cfg.rule_c, cfg.horizon).h : cfg.bandwidths[b];
      for (std::size_t f = 0; f < F; ++f) {
        try {
          const CurveEstimate curve = estimate_curve(
              rep.triples, cfg.target, KernelSpec{cfg.families[f], row.h[b]}, grid);
          CompensatedSum se;
          std::size_t used = 0;
          for (std::size_t k = 0; k < grid.size(); ++k)
            if (curve.ok(k)) {
              const double e = curve.values[k] - tv[k];
              se += e * e;
              ++used;
            }
          row.mse[f * H + b] = se.value() / static_cast<double>(used);
        } catch (const NumericalError&) {
        }
      }
    }
    return row;
  };
  const auto rows = parallel_replicates<Row>(cfg.replicates, worker_count(cfg), run_one);

  McReport report;
  report.experiment = "mse";
  report.config = cfg;
  for (std::size_t f = 0; f < F; ++f)
    for (std::size_t b = 0; b < H; ++b) {
      McCell cell;
      cell.family = cfg.families[f];
      cell.x = kNaN;
      cell.replicates = cfg.replicates;
      std::vector<double> hs;
      for (const Row& row : rows) {
        cell.estimates.push_back(row.mse[f * H + b]);
        hs.push_back(row.h[b]);
        if (!std::isfinite(row.mse[f * H + b]))
          ++cell.failures;
      }
      cell.h = rule ? finite_moments(hs).mean : cfg.bandwidths[b];
      const Moments m = finite_moments(cell.estimates);
      cell.mse = m.mean;
      cell.estimate_variance = m.variance;
      report.cells.push_back(std::move(cell));
    }
  return report;
}

McReport run_coverage_experiment(const McConfig& cfg)
{
  return band_experiment(cfg, "coverage");
}

McReport run_adjusted_length_experiment(const McConfig& cfg)
{
  if (cfg.replicates < 40)
    throw ConfigError("adjusted lengths need at least 40 replicates, got " +
                      std::to_string(cfg.replicates));
  McReport report = band_experiment(cfg, "adjusted_length");
  for (auto& cell : report.cells) {
    std::vector<double> t, se;
    for (std::size_t r = 0; r < cell.studentized.size(); ++r)
      if (std::isfinite(cell.studentized[r])) {
        t.push_back(cell.studentized[r]);
        se.push_back(cell.std_errors[r]);
      }
    if (t.size() < 2) {
      cell.quantile_lo = cell.quantile_hi = cell.adjusted_length = kNaN;
      cell.adjusted_coverage = kNaN;
      continue;
    }
    const AdjustedCritical adj = adjust_critical_values(t, se, cfg.alpha);
    cell.quantile_lo = adj.lo;
    cell.quantile_hi = adj.hi;
    cell.adjusted_length = adj.mean_length;
    cell.adjusted_coverage = adj.coverage;
  }
  fill_ratios(report.cells, true);
  return report;
}

double sample_quantile(std::span<const double> values, double p)
{
  if (values.empty())
    throw ArgumentError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0))
    throw ArgumentError("quantile level must lie in [0, 1]");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

AdjustedCritical adjust_critical_values(std::span<const double> studentized,
                                        std::span<const double> std_errors,
                                        double alpha)
{
  if (studentized.size() != std_errors.size() || studentized.empty())
    throw ArgumentError("studentized errors and standard errors must match and be nonempty");
  AdjustedCritical out;
  out.lo = sample_quantile(studentized, alpha / 2.0);
  out.hi = sample_quantile(studentized, 1.0 - alpha / 2.0);
  CompensatedSum len;
  std::size_t inside = 0;
  for (std::size_t i = 0; i < studentized.size(); ++i) {
    len += (out.hi - out.lo) * std_errors[i];
    if (studentized[i] >= out.lo && studentized[i] <= out.hi)
      ++inside;
  }
  const auto count = static_cast<double>(studentized.size());
  out.mean_length = len.value() / count;
  out.coverage = 100.0 * static_cast<double>(inside) / count;
  return out;
}

double coverage_percent(std::span<const double> lower, std::span<const double> upper,
                        double truth)
{
  if (lower.size() != upper.size())
    throw ArgumentError("band bounds differ in length");
  std::size_t used = 0, hit = 0;
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (std::isnan(lower[i]) || std::isnan(upper[i]))
      continue;
    ++used;
    if (lower[i] <= truth && truth <= upper[i])
      ++hit;
  }
  if (used == 0)
    return kNaN;
  return 100.0 * static_cast<double>(hit) / static_cast<double>(used);
}

std::vector<std::pair<double, double>> qq_data(std::span<const double> values)
{
  if (values.size() < 40)
    throw ArgumentError("QQ data needs at least 40 values, got " +
                        std::to_string(values.size()));
  const Moments m = finite_moments(values);
  if (m.count != values.size())
    throw DataError("QQ data contains non-finite values");
  const double sd = std::sqrt(m.variance);
  if (!(sd > 0.0))
    throw NumericalError("QQ data has zero spread");
  std::vector<double> z(values.begin(), values.end());
  std::sort(z.begin(), z.end());
  const auto R = static_cast<double>(z.size());
  std::vector<std::pair<double, double>> pairs(z.size());
  for (std::size_t i = 0; i < z.size(); ++i)
    pairs[i] = {normal_quantile((static_cast<double>(i) + 0.5) / R), (z[i] - m.mean) / sd};
  return pairs;
}

double qq_correlation(std::span<const std::pair<double, double>> pairs)
{
  if (pairs.size() < 2)
    throw ArgumentError("correlation needs at least two pairs");
  double ma = 0.0, mb = 0.0;
  for (const auto& [a, b] : pairs) {
    ma += a;
    mb += b;
  }
  ma /= static_cast<double>(pairs.size());
  mb /= static_cast<double>(pairs.size());
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (const auto& [a, b] : pairs) {
    sab += (a - ma) * (b - mb);
    saa += (a - ma) * (a - ma);
    sbb += (b - mb) * (b - mb);
  }
  if (!(saa > 0.0 && sbb > 0.0))
    throw NumericalError("correlation of a constant sequence");
  return sab / std::sqrt(saa * sbb);
}

void write_report_csv(const McReport& report, std::ostream& out)
{
  write_comment_header(out, {{"tool", "jdgamma " + std::string(kVersion)},
                             {"experiment", report.experiment},
                             {"config", config_json(report.config).dump()},
                             {"seed", std::to_string(report.config.base_seed)}});
  CsvWriter csv(out);
  csv.header({"experiment", "kernel", "h", "x", "replicates", "failures", "mse", "coverage",
              "mean_bias", "estimate_variance", "mean_est_variance", "sd_est_variance",
              "mean_length", "length_ratio", "quantile_lo", "quantile_hi", "adjusted_length",
              "adjusted_coverage", "adjusted_ratio"});
  for (const auto& c : report.cells) {
    csv.field(std::string_view(report.experiment))
        .field(to_string(c.family))
        .field(c.h)
        .field(c.x)
        .field(c.replicates)
        .field(c.failures)
        .field(c.mse)
        .field(c.coverage)
        .field(c.mean_bias)
        .field(c.estimate_variance)
        .field(c.mean_est_variance)
        .field(c.sd_est_variance)
        .field(c.mean_length)
        .field(c.length_ratio)
        .field(c.quantile_lo)
        .field(c.quantile_hi)
        .field(c.adjusted_length)
        .field(c.adjusted_coverage)
        .field(c.adjusted_ratio);
    csv.end_row();
  }
}

void write_report_json(const McReport& report, std::ostream& out)
{
  using nlohmann::json;
  json seeds = json::array();
  for (std::size_t r = 0; r < report.config.replicates; ++r)
    seeds.push_back(stream_seed(report.config.base_seed, r));
  json cells = json::array();
  for (const auto& c : report.cells) {
    cells.push_back({{"kernel", std::string(to_string(c.family))},
                     {"h", number_or_null(c.h)},
                     {"x", number_or_null(c.x)},
                     {"replicates", c.replicates},
                     {"failures", c.failures},
                     {"mse", number_or_null(c.mse)},
                     {"coverage", number_or_null(c.coverage)},
                     {"mean_bias", number_or_null(c.mean_bias)},
                     {"estimate_variance", number_or_null(c.estimate_variance)},
                     {"mean_est_variance", number_or_null(c.mean_est_variance)},
                     {"sd_est_variance", number_or_null(c.sd_est_variance)},
                     {"mean_length", number_or_null(c.mean_length)},
                     {"length_ratio", number_or_null(c.length_ratio)},
                     {"quantile_lo", number_or_null(c.quantile_lo)},
                     {"quantile_hi", number_or_null(c.quantile_hi)},
                     {"adjusted_length", number_or_null(c.adjusted_length)},
                     {"adjusted_coverage", number_or_null(c.adjusted_coverage)},
                     {"adjusted_ratio", number_or_null(c.adjusted_ratio)},
                     {"estimates", numbers_or_null(c.estimates)},
                     {"std_errors", numbers_or_null(c.std_errors)},
                     {"studentized", numbers_or_null(c.studentized)}});
  }
  const json doc{{"tool", "jdgamma"},
                 {"version", std::string(kVersion)},
                 {"experiment", report.experiment},
                 {"config", config_json(report.config)},
                 {"seed_rule", "replicate r uses stream_seed(base_seed, r)"},
                 {"replicate_seeds", seeds},
                 {"cells", cells}};
  out << doc.dump(2) << '\n';
}

} // namespace jdgamma
