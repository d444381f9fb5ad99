#include "jdgamma/cli.hpp"

#include "jdgamma/errors.hpp"

#include <CLI11.hpp>

#include <ostream>
#include <sstream>

namespace jdgamma {

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
  RunConfig cfg;
  CLI::App app{"Jump-diffusion drift and variance estimation with Gamma kernels", "jdgamma"};
  app.set_config("--config", "", "TOML/INI file with option defaults (flags override)");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(JDGAMMA_VERSION));

  std::string proxy = "levels";
  std::vector<std::string> kernels{"gamma"};
  std::vector<std::string> targets{"drift", "m2"};
  std::string input;
  std::string output = ".";
  bool no_bias = false;

  auto* g = "Input";
  app.add_option("-i,--input", input, "CSV file with the observed series")->group(g);
  app.add_option("--value-column", cfg.value_column, "value column (default: last)")->group(g);
  app.add_option("--time-column", cfg.time_column, "time column, checked for monotonicity")
      ->group(g);
  app.add_option("--delta", cfg.delta, "sampling interval (required for data commands)")
      ->group(g);
  app.add_option("--proxy", proxy, "levels, log-prices or returns")->group(g);

  g = "Estimation";
  app.add_option("--kernel", kernels, "gamma and/or gaussian")->delimiter(',')->group(g);
  app.add_option("--target", targets, "drift, m2, m4, m6")->delimiter(',')->group(g);
  app.add_option("--bandwidth-method", cfg.bandwidth_method, "rule, fixed, cv or mse")
      ->group(g);
  app.add_option("--fixed-h", cfg.h, "bandwidth for --bandwidth-method fixed")->group(g);
  app.add_option("--c", cfg.c, "rule-of-thumb constant")->group(g);
  app.add_option("--cv-k", cfg.cv_k, "CV block half-width (0: n^(1/4))")->group(g);
  app.add_option("--candidates", cfg.candidates, "bandwidth candidates for searches")->group(g);
  app.add_option("--grid-points", cfg.grid_points, "evaluation grid size")->group(g);
  app.add_option("--grid-min", cfg.grid_min)->group(g);
  app.add_option("--grid-max", cfg.grid_max)->group(g);
  app.add_option("--grid-qlo", cfg.grid_qlo, "lower proxy quantile of the grid")->group(g);
  app.add_option("--grid-qhi", cfg.grid_qhi, "upper proxy quantile of the grid")->group(g);
  app.add_option("--alpha", cfg.alpha, "band level is 1 - alpha")->group(g);
  app.add_option("--tau", cfg.tau, "x/h at or above which a point is interior")->group(g);
  app.add_option("--regime", cfg.regime, "auto, interior or boundary")->group(g);
  app.add_flag("--no-bias-correction", no_bias, "bands without bias correction")->group(g);
  app.add_option("--series", cfg.jump_series, "jump test input: increments or returns")
      ->group(g);

  g = "Simulation";
  app.add_option("--a0", cfg.model.a0)->group(g);
  app.add_option("--a1", cfg.model.a1)->group(g);
  app.add_option("--b0", cfg.model.b0)->group(g);
  app.add_option("--b1", cfg.model.b1)->group(g);
  app.add_option("--expected-jumps", cfg.model.jumps.expected_total, "lambda * T")->group(g);
  app.add_option("--jump-std", cfg.model.jumps.size_std)->group(g);
  app.add_option("--jump-mean", cfg.model.jumps.size_mean)->group(g);
  app.add_option("--x0", cfg.model.x0)->group(g);
  app.add_option("--y0", cfg.model.y0)->group(g);
  app.add_option("-T,--horizon", cfg.horizon)->group(g);
  app.add_option("-n,--steps", cfg.n)->group(g);
  app.add_option("--substeps", cfg.substeps, "Euler steps per observation")->group(g);
  app.add_flag("--true-curvature", cfg.true_curvature,
               "mc-table bias correction from the model's exact second derivative")
      ->group(g);
  app.add_option("--experiment", cfg.experiment, "mse, coverage or adjusted")->group(g);
  app.add_option("--replicates", cfg.replicates)->group(g);
  app.add_option("--bandwidths", cfg.bandwidths)->delimiter(',')->group(g);
  app.add_option("--eval-points", cfg.eval_points)->delimiter(',')->group(g);
  app.add_option("--threads", cfg.threads, "worker threads for mc-table")->group(g);

  g = "Output";
  app.add_option("--seed", cfg.seed)->group(g);
  app.add_option("-o,--out", output, "output directory")->group(g);

  const std::pair<const char*, Subcommand> commands[] = {
      {"simulate", Subcommand::Simulate},   {"estimate", Subcommand::Estimate},
      {"bandwidth", Subcommand::Bandwidth}, {"ci", Subcommand::Ci},
      {"jumptest", Subcommand::JumpTest},   {"mc-table", Subcommand::McTable}};
  const char* descriptions[] = {"simulate a path and write path.csv / jumps.csv",
                                "fit drift / moment curves and write estimate.csv",
                                "select a bandwidth and write its score curve",
                                "confidence bands for drift and m2",
                                "bipower jump test on the proxy",
                                "Monte Carlo tables (CSV + JSON)"};
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < std::size(commands); ++i)
    subs.push_back(app.add_subcommand(commands[i].first, descriptions[i])->fallthrough());

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    std::ostringstream msg;
    app.exit(e, msg, msg);
    out << msg.str();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error category=config message=" << e.what() << '\n';
    return 2;
  }

  try {
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (subs[i]->parsed())
        cfg.command = commands[i].second;
    cfg.input = input;
    cfg.output_dir = output;
    cfg.proxy_mode = parse_proxy_mode(proxy);
    cfg.bias_correction = !no_bias;
    cfg.families.clear();
    for (const auto& k : kernels)
      cfg.families.push_back(parse_kernel_family(k));
    cfg.targets.clear();
    for (const auto& t : targets)
      cfg.targets.push_back(parse_target(t));
  } catch (const ArgumentError& e) {
    err << "error category=config message=" << e.what() << '\n';
    return 2;
  }
  return run_pipeline(cfg, out, err);
}

} // namespace jdgamma
