#include "jdgamma/simulate.hpp"

#include "jdgamma/errors.hpp"
#include "jdgamma/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace jdgamma {

ModelSpec ModelSpec::baseline(double expected_jumps, double jump_std)
{
  ModelSpec m;
  m.a0 = 1.0;
  m.a1 = -10.0;
  m.b0 = 0.1;
  m.b1 = 0.1;
  m.jumps = {expected_jumps, jump_std, 0.0};
  m.x0 = 0.1;
  m.y0 = 100.0;
  return m;
}

void ModelSpec::validate() const
{
  const double values[] = {a0, a1, b0, b1, x0, y0, jumps.expected_total,
                           jumps.size_std, jumps.size_mean};
  for (double v : values)
    if (!std::isfinite(v))
      throw ArgumentError("model coefficients must be finite");
  if (jumps.expected_total < 0.0)
    throw ArgumentError("expected jump count lambda*T must be nonnegative");
  if (jumps.size_std < 0.0)
    throw ArgumentError("jump size std must be nonnegative");
}

SamplePath simulate_path(const ModelSpec& model,
                         double horizon,
                         std::size_t n,
                         std::uint64_t seed,
                         const SimulationOptions& options)
{
  model.validate();
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw ArgumentError("horizon T must be positive");
  if (n < 2)
    throw ArgumentError("simulate_path needs n >= 2 steps, got " + std::to_string(n));
  if (options.substeps < 1)
    throw ArgumentError("substeps must be at least 1");

  const std::size_t m = options.substeps;
  const std::size_t fine_steps = n * m;
  const double delta = horizon / static_cast<double>(n);
  const double dt = horizon / static_cast<double>(fine_steps);
  const double sqrt_dt = std::sqrt(dt);

  Engine rng = make_engine(seed);
  std::normal_distribution<double> std_normal(0.0, 1.0);

  SamplePath path;
  path.delta = delta;
  path.seed = seed;
  path.substeps = m;

  // Algorithm order: jump count, jump times, jump sizes, then Brownian draws.
  std::size_t jump_count = 0;
  if (model.jumps.expected_total > 0.0) {
    std::poisson_distribution<std::size_t> poisson(model.jumps.expected_total);
    jump_count = poisson(rng);
  }
  std::uniform_real_distribution<double> uniform(0.0, horizon);
  std::vector<double> times(jump_count);
  for (auto& t : times)
    t = uniform(rng);
  std::vector<double> sizes(jump_count);
  for (auto& z : sizes)
    z = model.jumps.size_mean + model.jumps.size_std * std_normal(rng);

  std::vector<std::size_t> order(jump_count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
  path.jump_times.reserve(jump_count);
  path.jump_sizes.reserve(jump_count);
  for (std::size_t k : order) {
    path.jump_times.push_back(times[k]);
    path.jump_sizes.push_back(sizes[k]);
  }

  // Jump total per fine step; tau in [j dt, (j+1) dt) belongs to step j.
  std::vector<double> step_jumps(fine_steps, 0.0);
  for (std::size_t k = 0; k < jump_count; ++k) {
    auto j = static_cast<std::size_t>(std::floor(path.jump_times[k] / dt));
    j = std::min(j, fine_steps - 1);
    step_jumps[j] += path.jump_sizes[k];
  }

  path.x.resize(n + 1);
  path.y.resize(n + 1);
  path.x[0] = model.x0;
  path.y[0] = model.y0;
  if (options.record_increments) {
    path.diffusion_increments.assign(n, 0.0);
    path.jump_increments.assign(n, 0.0);
  }

  double x = model.x0;
  double y = model.y0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t s = 0; s < m; ++s) {
      const std::size_t j = i * m + s;
      double var = model.diffusion_variance(x);
      if (var < 0.0) {
        ++path.negative_variance_steps;
        var = 0.0;
      }
      const double diffusion = std::sqrt(var) * sqrt_dt * std_normal(rng);
      const double x_next = x + model.drift(x) * dt + diffusion + step_jumps[j];
      y += x * dt;
      x = x_next;
      if (options.record_increments) {
        path.diffusion_increments[i] += diffusion;
        path.jump_increments[i] += step_jumps[j];
      }
    }
    path.x[i + 1] = x;
    path.y[i + 1] = y;
  }
  return path;
}

TrueMoments true_moments(const ModelSpec& model, double horizon, double x)
{
  if (!(horizon > 0.0))
    throw ArgumentError("horizon T must be positive");
  const double lambda = model.jumps.expected_total / horizon;
  const double mz = model.jumps.size_mean;
  const double vz = model.jumps.size_std * model.jumps.size_std;
  const double ez2 = mz * mz + vz;
  const double ez4 = mz * mz * mz * mz + 6.0 * mz * mz * vz + 3.0 * vz * vz;
  const double ez6 = std::pow(mz, 6) + 15.0 * std::pow(mz, 4) * vz +
                     45.0 * mz * mz * vz * vz + 15.0 * vz * vz * vz;
  TrueMoments t{};
  t.mu = model.drift(x);
  t.sigma2 = model.diffusion_variance(x);
  t.m2 = t.sigma2 + lambda * ez2;
  t.c4 = lambda * ez4;
  t.c6 = lambda * ez6;
  t.lambda = lambda;
  t.sigma_z2 = vz;
  return t;
}

} // namespace jdgamma
