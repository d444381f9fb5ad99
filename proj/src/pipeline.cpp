#include "jdgamma/pipeline.hpp"

#include "jdgamma/bandwidth.hpp"
#include "jdgamma/csv.hpp"
#include "jdgamma/errors.hpp"
#include "jdgamma/inference.hpp"
#include "jdgamma/locallinear.hpp"
#include "jdgamma/mc_harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

namespace jdgamma {

namespace fs = std::filesystem;

namespace {

bool data_command(Subcommand c)
{
  return c == Subcommand::Estimate || c == Subcommand::Bandwidth || c == Subcommand::Ci ||
         c == Subcommand::JumpTest;
}

std::ofstream open_output(const RunConfig& cfg, const std::string& name)
{
  fs::create_directories(cfg.output_dir);
  const fs::path path = cfg.output_dir / name;
  std::ofstream out(path);
  if (!out)
    throw DataError("cannot write '" + path.string() + "'");
  return out;
}

HeaderEntries run_header(const RunConfig& cfg)
{
  return {{"tool", "jdgamma " + std::string(kVersion)},
          {"command", std::string(to_string(cfg.command))},
          {"config", config_echo(cfg)},
          {"seed", std::to_string(cfg.seed)}};
}

PointRegime::Kind rule_regime(const RunConfig& cfg)
{
  return cfg.regime == "boundary" ? PointRegime::Kind::Boundary : PointRegime::Kind::Interior;
}

std::function<double(double)> model_truth(const RunConfig& cfg, Target target, double horizon)
{
  const ModelSpec model = cfg.model;
  switch (target) {
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

// A curve with no usable point is a numerical failure of the whole run.
void require_some_fit(const CurveEstimate& curve, const std::string& name)
{
  if (curve.failures.size() == curve.size())
    throw NumericalError("every grid point failed for " + name +
                         " (first: " + std::string(to_string(curve.status.front())) + ")");
}

std::vector<double> evaluation_grid(const RunConfig& cfg, const ProxySeries& proxy)
{
  const bool any_gamma = std::find(cfg.families.begin(), cfg.families.end(),
                                   KernelFamily::GammaAsymmetric) != cfg.families.end();
  if (std::isfinite(cfg.grid_min) && std::isfinite(cfg.grid_max)) {
    if (any_gamma && cfg.grid_min < 0.0)
      throw ConfigError("grid minimum must be >= 0 with the Gamma kernel");
    return uniform_grid(cfg.grid_min, cfg.grid_max, cfg.grid_points);
  }
  return proxy_range_grid(proxy, cfg.grid_points, cfg.grid_qlo, cfg.grid_qhi,
                          any_gamma ? KernelFamily::GammaAsymmetric
                                    : KernelFamily::GaussianSymmetric);
}

BandwidthChoice choose_bandwidth(const RunConfig& cfg,
                                 const ProxySeries& proxy,
                                 KernelFamily family,
                                 Target target)
{
  const double horizon = proxy.span_time();
  const std::string& m = cfg.bandwidth_method;
  if (m == "fixed") {
    BandwidthChoice choice;
    choice.h = cfg.h;
    return choice;
  }
  if (m == "rule")
    return rule_of_thumb(proxy, cfg.c, horizon, rule_regime(cfg));
  if (m == "cv") {
    const double ref = rule_of_thumb(proxy, cfg.c, horizon, rule_regime(cfg)).h;
    BlockCvOptions opts;
    opts.k = cfg.cv_k;
    opts.family = family;
    opts.target = target;
    return block_cv(proxy, default_candidate_grid(ref, cfg.candidates), opts);
  }
  if (m == "mse") {
    const auto c_grid = default_candidate_grid(cfg.c, cfg.candidates);
    const auto x_grid = evaluation_grid(cfg, proxy);
    return mse_grid_search(model_truth(cfg, target, horizon), proxy, c_grid, horizon, x_grid,
                           family, target);
  }
  throw ConfigError("unknown bandwidth method '" + m + "' (expected rule, fixed, cv or mse)");
}

void run_simulate(const RunConfig& cfg, std::ostream& out)
{
  SimulationOptions opts;
  opts.substeps = cfg.substeps;
  const SamplePath path = simulate_path(cfg.model, cfg.horizon, cfg.n, cfg.seed, opts);

  auto header = run_header(cfg);
  header.emplace_back("delta", format_double(path.delta));
  {
    std::ofstream f = open_output(cfg, "path.csv");
    write_comment_header(f, header);
    CsvWriter csv(f);
    csv.header({"t", "x", "y"});
    for (std::size_t i = 0; i < path.x.size(); ++i) {
      csv.field(path.delta * static_cast<double>(i)).field(path.x[i]).field(path.y[i]);
      csv.end_row();
    }
  }
  {
    std::ofstream f = open_output(cfg, "jumps.csv");
    write_comment_header(f, header);
    CsvWriter csv(f);
    csv.header({"time", "size"});
    for (std::size_t j = 0; j < path.jump_times.size(); ++j) {
      csv.field(path.jump_times[j]).field(path.jump_sizes[j]);
      csv.end_row();
    }
  }
  out << "simulated " << path.steps() << " steps, " << path.jump_times.size()
      << " jumps, delta=" << format_double(path.delta) << " -> "
      << (cfg.output_dir / "path.csv").string() << '\n';
}

void run_estimate(const RunConfig& cfg, std::ostream& out)
{
  const ProxySeries proxy = load_proxy(cfg);
  const RegressionTriples triples = build_regression_triples(proxy);
  const std::vector<double> grid = evaluation_grid(cfg, proxy);

  std::vector<std::string> columns{"x"};
  std::vector<CurveEstimate> curves;
  auto header = run_header(cfg);
  for (KernelFamily family : cfg.families)
    for (Target target : cfg.targets) {
      const BandwidthChoice bw = choose_bandwidth(cfg, proxy, family, target);
      const std::string name = std::string(to_string(family)) + "_" + std::string(to_string(target));
      header.emplace_back("bandwidth " + name, format_double(bw.h));
      curves.push_back(map_local_fits(triples, target, KernelSpec{family, bw.h}, grid));
      require_some_fit(curves.back(), name);
      columns.push_back(name);
      columns.push_back(name + "_status");
    }

  std::ofstream f = open_output(cfg, "estimate.csv");
  write_comment_header(f, header);
  CsvWriter csv(f);
  csv.header(columns);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    csv.field(grid[k]);
    for (const auto& c : curves)
      csv.field(c.values[k]).field(to_string(c.status[k]));
    csv.end_row();
  }
  std::size_t failures = 0;
  for (const auto& c : curves)
    failures += c.failures.size();
  out << "estimated " << curves.size() << " curves on " << grid.size() << " points ("
      << failures << " point failures) -> " << (cfg.output_dir / "estimate.csv").string() << '\n';
}

void run_bandwidth(const RunConfig& cfg, std::ostream& out)
{
  const ProxySeries proxy = load_proxy(cfg);
  const KernelFamily family = cfg.families.front();
  const Target target = cfg.targets.front();
  const BandwidthChoice choice = choose_bandwidth(cfg, proxy, family, target);

  auto header = run_header(cfg);
  header.emplace_back("method", std::string(to_string(choice.method)));
  header.emplace_back("chosen_h", format_double(choice.h));
  std::ofstream f = open_output(cfg, "bandwidth.csv");
  write_comment_header(f, header);
  CsvWriter csv(f);
  csv.header({"candidate", "h", "score", "failures"});
  for (const auto& s : choice.scores) {
    csv.field(s.candidate).field(s.h).field(s.score).field(s.failures);
    csv.end_row();
  }
  out << "method=" << to_string(choice.method) << " kernel=" << to_string(family)
      << " target=" << to_string(target) << " h=" << format_double(choice.h);
  if (choice.method == BandwidthMethod::RuleOfThumb || choice.method == BandwidthMethod::MseGrid)
    out << " c=" << format_double(choice.c);
  out << '\n';
}

void run_ci(const RunConfig& cfg, std::ostream& out)
{
  const ProxySeries proxy = load_proxy(cfg);
  const RegressionTriples triples = build_regression_triples(proxy);
  const std::vector<double> grid = evaluation_grid(cfg, proxy);

  BandOptions opts;
  opts.tau = cfg.tau;
  opts.bias_correction = cfg.bias_correction;
  if (cfg.regime == "interior")
    opts.forced_regime = PointRegime::Kind::Interior;
  else if (cfg.regime == "boundary")
    opts.forced_regime = PointRegime::Kind::Boundary;

  for (Target target : cfg.targets) {
    if (target != Target::Drift && target != Target::CondVariance)
      continue;
    auto header = run_header(cfg);
    std::vector<ConfidenceBand> bands;
    for (KernelFamily family : cfg.families) {
      const BandwidthChoice bw = choose_bandwidth(cfg, proxy, family, target);
      const KernelSpec kernel{family, bw.h};
      header.emplace_back("bandwidth " + std::string(to_string(family)), format_double(bw.h));
      const CurveEstimate curve = map_local_fits(triples, target, kernel, grid);
      require_some_fit(curve, std::string(to_string(family)) + "_" +
                                  std::string(to_string(target)));
      const BandCompanions comp = estimate_companions(triples, proxy, kernel, grid, target);
      bands.push_back(confidence_band(curve, comp, cfg.alpha, proxy.size(), proxy.delta, opts));
    }

    std::vector<std::string> columns{"x"};
    for (const auto& b : bands) {
      const std::string p = std::string(to_string(b.family)) + "_";
      for (const char* c : {"estimate", "center", "lower", "upper", "se", "guard_se", "valid",
                            "clipped", "regime", "kappa"})
        columns.push_back(p + c);
    }
    const auto find_family = [&](KernelFamily fam) -> const ConfidenceBand* {
      for (const auto& b : bands)
        if (b.family == fam)
          return &b;
      return nullptr;
    };
    const ConfidenceBand* gamma = find_family(KernelFamily::GammaAsymmetric);
    const ConfidenceBand* gauss = find_family(KernelFamily::GaussianSymmetric);
    const bool ratio = gamma && gauss;
    if (ratio)
      columns.push_back("length_ratio");

    const std::string name = "bands_" + std::string(to_string(target)) + ".csv";
    std::ofstream f = open_output(cfg, name);
    write_comment_header(f, header);
    CsvWriter csv(f);
    csv.header(columns);
    std::size_t invalid = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      csv.field(grid[k]);
      for (const auto& b : bands) {
        csv.field(b.estimate[k])
            .field(b.center[k])
            .field(b.lower[k])
            .field(b.upper[k])
            .field(b.std_error[k])
            .field(b.guard_std_error[k])
            .field(std::string_view(b.valid[k] ? "1" : "0"))
            .field(std::string_view(b.clipped[k] ? "1" : "0"))
            .field(to_string(b.regime[k].kind))
            .field(b.regime[k].is_boundary() ? b.regime[k].kappa : grid[k] / b.bandwidth);
        if (!b.valid[k])
          ++invalid;
      }
      if (ratio) {
        const bool both = gamma->valid[k] && gauss->valid[k] && gamma->length(k) > 0.0;
        csv.field(both ? gauss->length(k) / gamma->length(k) : 0.0);
      }
      csv.end_row();
    }
    out << "bands for " << to_string(target) << " on " << grid.size() << " points ("
        << invalid << " invalid) -> " << (cfg.output_dir / name).string() << '\n';
  }
}

void run_jumptest(const RunConfig& cfg, std::ostream& out)
{
  const ProxySeries proxy = load_proxy(cfg);
  std::vector<double> series;
  if (cfg.jump_series == "increments")
    series = latent_increments(proxy);
  else if (cfg.jump_series == "returns")
    series = proxy_returns(proxy);
  else
    throw ConfigError("jump series must be 'increments' or 'returns'");
  const JumpTestResult r = bs_jump_test(series);

  const std::string line = "statistic=" + format_double(r.statistic) +
                           " RV=" + format_double(r.realized_variance) +
                           " BV=" + format_double(r.bipower_variation) +
                           " QP=" + format_double(r.quadpower) + " n=" + std::to_string(r.n) +
                           " decision=" + (r.reject_at_5pct ? "reject" : "no-reject") +
                           " (5% level, |stat| > 1.96)";
  std::ofstream f = open_output(cfg, "jumptest.txt");
  write_comment_header(f, run_header(cfg));
  f << line << '\n';
  out << line << '\n';
}

void run_mc_table(const RunConfig& cfg, std::ostream& out)
{
  McConfig mc;
  mc.model = cfg.model;
  mc.horizon = cfg.horizon;
  mc.n = cfg.n;
  mc.replicates = cfg.replicates;
  mc.families = cfg.families;
  mc.bandwidths = cfg.bandwidths;
  mc.rule_c = cfg.c;
  mc.eval_points = cfg.eval_points;
  mc.mse_grid_points = cfg.grid_points;
  mc.grid_qlo = cfg.grid_qlo;
  mc.grid_qhi = cfg.grid_qhi;
  mc.target = cfg.targets.front();
  mc.base_seed = cfg.seed;
  mc.alpha = cfg.alpha;
  mc.substeps = cfg.substeps;
  mc.threads = cfg.threads;
  mc.band.tau = cfg.tau;
  mc.band.bias_correction = cfg.bias_correction;
  mc.true_curvature = cfg.true_curvature;
  if (cfg.regime == "interior")
    mc.band.forced_regime = PointRegime::Kind::Interior;
  else if (cfg.regime == "boundary")
    mc.band.forced_regime = PointRegime::Kind::Boundary;

  McReport report;
  if (cfg.experiment == "mse")
    report = run_mse_experiment(mc);
  else if (cfg.experiment == "coverage")
    report = run_coverage_experiment(mc);
  else if (cfg.experiment == "adjusted")
    report = run_adjusted_length_experiment(mc);
  else
    throw ConfigError("unknown experiment '" + cfg.experiment +
                      "' (expected mse, coverage or adjusted)");

  {
    std::ofstream f = open_output(cfg, "report.csv");
    write_report_csv(report, f);
  }
  {
    std::ofstream f = open_output(cfg, "report.json");
    write_report_json(report, f);
  }
  out << report.experiment << ": " << report.cells.size() << " cells over " << mc.replicates
      << " replicates -> " << (cfg.output_dir / "report.csv").string() << '\n';
}

void print_error(std::ostream& err, const char* category, const std::exception& e)
{
  err << "error category=" << category << " message=" << e.what() << '\n';
}

} // namespace

std::string_view to_string(Subcommand command)
{
  switch (command) {
    case Subcommand::Simulate:
      return "simulate";
    case Subcommand::Estimate:
      return "estimate";
    case Subcommand::Bandwidth:
      return "bandwidth";
    case Subcommand::Ci:
      return "ci";
    case Subcommand::JumpTest:
      return "jumptest";
    case Subcommand::McTable:
      return "mc-table";
  }
  return "unknown";
}

std::string_view to_string(ProxyMode mode)
{
  switch (mode) {
    case ProxyMode::Levels:
      return "levels";
    case ProxyMode::LogPrices:
      return "log-prices";
    case ProxyMode::Returns:
      return "returns";
  }
  return "unknown";
}

ProxyMode parse_proxy_mode(std::string_view name)
{
  if (name == "levels")
    return ProxyMode::Levels;
  if (name == "log-prices")
    return ProxyMode::LogPrices;
  if (name == "returns")
    return ProxyMode::Returns;
  throw ConfigError("unknown proxy mode '" + std::string(name) +
                    "' (expected levels, log-prices or returns)");
}

void RunConfig::validate() const
{
  if (data_command(command)) {
    if (input.empty())
      throw ConfigError(std::string(to_string(command)) + " needs an input file");
    if (!(delta > 0.0) || !std::isfinite(delta))
      throw ConfigError("delta must be given explicitly and be positive");
  }
  if (families.empty())
    throw ConfigError("at least one kernel family is required");
  if (targets.empty())
    throw ConfigError("at least one target is required");
  if (bandwidth_method == "fixed" && !(h > 0.0))
    throw ConfigError("fixed bandwidth method needs h > 0");
  if (!(c > 0.0))
    throw ConfigError("rule-of-thumb constant c must be positive");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ConfigError("alpha must lie in (0, 1)");
  if (!(tau > 0.0))
    throw ConfigError("regime threshold must be positive");
  if (regime != "auto" && regime != "interior" && regime != "boundary")
    throw ConfigError("regime must be auto, interior or boundary");
  if (grid_points < 2)
    throw ConfigError("grid needs at least 2 points");
  if (std::isfinite(grid_min) != std::isfinite(grid_max))
    throw ConfigError("give both grid bounds or neither");
  if (std::isfinite(grid_min) && !(grid_max > grid_min))
    throw ConfigError("grid maximum must exceed the minimum");
  if (!(grid_qlo >= 0.0 && grid_qlo < grid_qhi && grid_qhi <= 1.0))
    throw ConfigError("grid quantiles must satisfy 0 <= lo < hi <= 1");
  if (command == Subcommand::Simulate || command == Subcommand::McTable) {
    model.validate();
    if (!(horizon > 0.0) || n < 3 || substeps == 0)
      throw ConfigError("simulation needs T > 0, n >= 3 and substeps >= 1");
  }
}

std::string config_echo(const RunConfig& cfg)
{
  using nlohmann::json;
  json families = json::array();
  for (auto f : cfg.families)
    families.push_back(std::string(to_string(f)));
  json targets = json::array();
  for (auto t : cfg.targets)
    targets.push_back(std::string(to_string(t)));
  const auto opt = [](double v) -> json {
    if (std::isfinite(v))
      return v;
    return nullptr;
  };
  // The worker count is left out on purpose: it never changes results.
  json j{{"command", std::string(to_string(cfg.command))},
         {"input", cfg.input.string()},
         {"value_column", cfg.value_column},
         {"time_column", cfg.time_column},
         {"delta", opt(cfg.delta)},
         {"proxy", std::string(to_string(cfg.proxy_mode))},
         {"kernels", families},
         {"targets", targets},
         {"bandwidth_method", cfg.bandwidth_method},
         {"h", cfg.h},
         {"c", cfg.c},
         {"cv_k", cfg.cv_k},
         {"candidates", cfg.candidates},
         {"grid_points", cfg.grid_points},
         {"grid_min", opt(cfg.grid_min)},
         {"grid_max", opt(cfg.grid_max)},
         {"grid_quantiles", {cfg.grid_qlo, cfg.grid_qhi}},
         {"alpha", cfg.alpha},
         {"tau", cfg.tau},
         {"regime", cfg.regime},
         {"bias_correction", cfg.bias_correction},
         {"true_curvature", cfg.true_curvature},
         {"jump_series", cfg.jump_series},
         {"seed", cfg.seed},
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
         {"substeps", cfg.substeps},
         {"experiment", cfg.experiment},
         {"replicates", cfg.replicates},
         {"bandwidths", cfg.bandwidths},
         {"eval_points", cfg.eval_points}};
  return j.dump();
}

ProxySeries load_proxy(const RunConfig& cfg)
{
  const SeriesData data = ingest_series(cfg.input, {cfg.value_column, cfg.time_column});
  switch (cfg.proxy_mode) {
    case ProxyMode::Levels:
      return build_proxy(data.values, cfg.delta);
    case ProxyMode::LogPrices:
      try {
        return build_log_proxy(data.values, cfg.delta);
      } catch (const DataError& e) {
        // Map the sequence index back to the file line.
        if (e.row() != DataError::npos && e.row() < data.lines.size())
          throw DataError(cfg.input.string() + ":" + std::to_string(data.lines[e.row()]) + ": " +
                              e.what(),
                          data.lines[e.row()]);
        throw;
      }
    case ProxyMode::Returns:
      return build_proxy_from_returns(data.values, cfg.delta);
  }
  throw ConfigError("unknown proxy mode");
}

int run_pipeline(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
  try {
    cfg.validate();
    switch (cfg.command) {
      case Subcommand::Simulate:
        run_simulate(cfg, out);
        break;
      case Subcommand::Estimate:
        run_estimate(cfg, out);
        break;
      case Subcommand::Bandwidth:
        run_bandwidth(cfg, out);
        break;
      case Subcommand::Ci:
        run_ci(cfg, out);
        break;
      case Subcommand::JumpTest:
        run_jumptest(cfg, out);
        break;
      case Subcommand::McTable:
        run_mc_table(cfg, out);
        break;
    }
    return 0;
  } catch (const ArgumentError& e) {
    print_error(err, "config", e);
    return 2;
  } catch (const DataError& e) {
    print_error(err, "data", e);
    return 3;
  } catch (const fs::filesystem_error& e) {
    print_error(err, "data", e);
    return 3;
  } catch (const NumericalError& e) {
    print_error(err, "numerical", e);
    return 4;
  } catch (const DomainError& e) {
    print_error(err, "numerical", e);
    return 4;
  }
}

} // namespace jdgamma
