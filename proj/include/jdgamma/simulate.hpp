#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace jdgamma {

struct JumpSpec
{
  double expected_total = 0.0; // lambda * T, expected number of jumps on [0, T]
  double size_std = 0.0;       // sigma_z
  double size_mean = 0.0;      // mu_z
};

/// Second-order jump-diffusion
///   dY = X dt,
///   dX = (a0 + a1 X) dt + sqrt(b0 + b1 X^2) dW + dJ,
/// with J compound Poisson with Normal(mu_z, sigma_z^2) sizes.
struct ModelSpec
{
  double a0 = 0.0;
  double a1 = 0.0;
  double b0 = 0.0;
  double b1 = 0.0;
  JumpSpec jumps;
  double x0 = 0.0;
  double y0 = 0.0;

  double drift(double x) const { return a0 + a1 * x; }
  double diffusion_variance(double x) const { return b0 + b1 * x * x; }

  /// dX = (1 - 10X)dt + sqrt(0.1 + 0.1X^2)dW + dJ, X0 = 0.1, Y0 = 100.
  static ModelSpec baseline(double expected_jumps = 20.0, double jump_std = 0.036);

  void validate() const;
};

struct SamplePath
{
  double delta = 0.0;             // observation spacing
  std::vector<double> x;          // latent X at observation times, n + 1 values
  std::vector<double> y;          // integrated Y at observation times, n + 1 values
  std::vector<double> jump_times; // sorted, in [0, T)
  std::vector<double> jump_sizes;
  std::uint64_t seed = 0;
  std::size_t substeps = 1;

  // Euler steps where b0 + b1 x^2 went negative (clamped to zero).
  std::size_t negative_variance_steps = 0;

  // Optional per-observation-interval sums of sigma(X) dW and of jumps;
  // filled only with SimulationOptions::record_increments.
  std::vector<double> diffusion_increments;
  std::vector<double> jump_increments;

  std::size_t steps() const { return x.empty() ? 0 : x.size() - 1; }
  double horizon() const { return delta * static_cast<double>(steps()); }
};

struct SimulationOptions
{
  /// Euler steps per observation interval. With 1 the scheme is the plain
  /// observation-grid Euler recursion, under which (Y_i - Y_{i-1})/delta is
  /// exactly X_{i-1}; larger values make Y a genuine time integral of X
  /// between observations.
  std::size_t substeps = 1;
  bool record_increments = false;
};

/// Euler-Maruyama path with compound Poisson jumps. Jump count is
/// Poisson(lambda T), times uniform on [0, T), sizes Normal(mu_z, sigma_z^2);
/// a jump at tau in [t_{j-1}, t_j) enters the step ending at t_j (jumps sharing
/// a step are summed). Y_j = Y_{j-1} + X_{j-1} dt. Same arguments give
/// bit-identical output.
SamplePath simulate_path(const ModelSpec& model,
                         double horizon,
                         std::size_t n,
                         std::uint64_t seed,
                         const SimulationOptions& options = {});

struct TrueMoments
{
  double mu;       // drift
  double m2;       // sigma^2(x) + lambda E[Z^2]
  double c4;       // lambda E[Z^4]
  double c6;       // lambda E[Z^6]
  double sigma2;   // diffusion part of m2
  double lambda;   // per-unit-time intensity
  double sigma_z2; // jump-size variance
};

//! Analytic coefficient functions at x; lambda = expected_total / horizon.
TrueMoments true_moments(const ModelSpec& model, double horizon, double x);

} // namespace jdgamma
