#pragma once

#include "jdgamma/kernels.hpp"
#include "jdgamma/proxy.hpp"
#include "jdgamma/simulate.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace jdgamma {

enum class Subcommand
{
  Simulate,
  Estimate,
  Bandwidth,
  Ci,
  JumpTest,
  McTable
};

enum class ProxyMode
{
  Levels,    // X~ = (Y_i - Y_{i-1}) / delta
  LogPrices, // X~ = (log P_i - log P_{i-1}) / delta
  Returns    // X~ = r_i / delta
};

std::string_view to_string(Subcommand command);
std::string_view to_string(ProxyMode mode);
ProxyMode parse_proxy_mode(std::string_view name);

struct RunConfig
{
  Subcommand command = Subcommand::Estimate;

  // Input series.
  std::filesystem::path input;
  std::string value_column; // empty: last column
  std::string time_column;  // empty: none
  double delta = 0.0;       // must be given explicitly for data commands
  ProxyMode proxy_mode = ProxyMode::Levels;

  std::vector<KernelFamily> families{KernelFamily::GammaAsymmetric};
  std::vector<Target> targets{Target::Drift, Target::CondVariance};

  // Bandwidth: "rule", "fixed", "cv" or "mse" (the latter needs the model truth).
  std::string bandwidth_method = "rule";
  double h = 0.0;
  double c = 2.8;
  std::size_t cv_k = 0;
  std::size_t candidates = 25;

  // Evaluation grid: explicit bounds, or quantiles of the proxy.
  std::size_t grid_points = 50;
  double grid_min = std::numeric_limits<double>::quiet_NaN();
  double grid_max = std::numeric_limits<double>::quiet_NaN();
  double grid_qlo = 0.0;
  double grid_qhi = 1.0;

  double alpha = 0.05;
  double tau = kDefaultRegimeThreshold;
  std::string regime = "auto"; // auto, interior, boundary
  bool bias_correction = true;
  bool true_curvature = false; // mc-table: model curvature instead of the pilot estimate
  std::string jump_series = "increments"; // increments or returns

  std::uint64_t seed = 1;
  std::filesystem::path output_dir = ".";

  // Simulation and Monte Carlo.
  ModelSpec model = ModelSpec::baseline();
  double horizon = 10.0;
  std::size_t n = 1000;
  std::size_t substeps = 1;
  std::string experiment = "coverage"; // mse, coverage, adjusted
  std::size_t replicates = 200;
  std::vector<double> bandwidths;
  std::vector<double> eval_points;
  std::size_t threads = 1;

  void validate() const;
};

//! Compact JSON echo of every setting that can change an artifact.
std::string config_echo(const RunConfig& cfg);

/// Runs one subcommand and writes its artifacts under output_dir.
/// Returns the process exit code: 0 ok, 2 config, 3 data, 4 numerical.
/// Failures print one machine-readable line to `err`:
///   error category=<config|data|numerical> message=<text>
int run_pipeline(const RunConfig& cfg, std::ostream& out, std::ostream& err);

//! Proxy built from the configured input file and mode.
ProxySeries load_proxy(const RunConfig& cfg);

} // namespace jdgamma
