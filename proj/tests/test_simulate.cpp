#include "jdgamma/errors.hpp"
#include "jdgamma/proxy.hpp"
#include "jdgamma/rng.hpp"
#include "jdgamma/simulate.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace jdgamma;

namespace {

ModelSpec deterministic(double a0, double a1, double x0)
{
  ModelSpec m;
  m.a0 = a0;
  m.a1 = a1;
  m.x0 = x0;
  m.y0 = 5.0;
  return m;
}

} // namespace

TEST_CASE("deterministic Euler on dX = dt")
{
  const auto path = simulate_path(deterministic(1.0, 0.0, 0.0), 3.0, 3, 7);
  CHECK(path.x == std::vector<double>{0.0, 1.0, 2.0, 3.0});
  CHECK(path.y == std::vector<double>{5.0, 5.0, 6.0, 8.0});
  CHECK(path.jump_times.empty());
  CHECK(path.delta == 1.0);
}

TEST_CASE("same seed gives identical paths, different seeds do not")
{
  const auto model = ModelSpec::baseline();
  const auto a = simulate_path(model, 10.0, 500, 42);
  const auto b = simulate_path(model, 10.0, 500, 42);
  const auto c = simulate_path(model, 10.0, 500, 43);
  CHECK(a.x == b.x);
  CHECK(a.y == b.y);
  CHECK(a.jump_times == b.jump_times);
  CHECK(a.jump_sizes == b.jump_sizes);
  CHECK(a.x != c.x);
}

TEST_CASE("path shape and jump record")
{
  const auto path = simulate_path(ModelSpec::baseline(), 10.0, 1000, 3);
  CHECK(path.x.size() == 1001);
  CHECK(path.y.size() == 1001);
  CHECK(path.x.front() == 0.1);
  CHECK(path.y.front() == 100.0);
  CHECK(path.jump_times.size() == path.jump_sizes.size());
  CHECK(std::is_sorted(path.jump_times.begin(), path.jump_times.end()));
  for (double t : path.jump_times) {
    CHECK(t >= 0.0);
    CHECK(t < 10.0);
  }
  CHECK(path.horizon() == doctest::Approx(10.0));
}

TEST_CASE("jump counts average the expected total")
{
  const auto model = ModelSpec::baseline();
  double total = 0.0;
  std::vector<double> sizes;
  const std::size_t seeds = 2000;
  for (std::size_t s = 0; s < seeds; ++s) {
    const auto path = simulate_path(model, 10.0, 50, stream_seed(99, s));
    total += static_cast<double>(path.jump_times.size());
    sizes.insert(sizes.end(), path.jump_sizes.begin(), path.jump_sizes.end());
  }
  CHECK(std::abs(total / seeds - 20.0) <= 1.0);

  const double mean = std::accumulate(sizes.begin(), sizes.end(), 0.0) / sizes.size();
  double ss = 0.0;
  for (double z : sizes)
    ss += (z - mean) * (z - mean);
  CHECK(std::sqrt(ss / (sizes.size() - 1)) == doctest::Approx(0.036).epsilon(0.02));
  CHECK(std::abs(mean) < 0.002);
}

TEST_CASE("integrated level satisfies the linear-drift identity")
{
  // Y_T - Y_0 = (X_T - X_0 - a0 T - sum sigma dW - sum jumps) / a1.
  for (std::size_t sub : {1u, 7u}) {
    SimulationOptions opt;
    opt.substeps = sub;
    opt.record_increments = true;
    const auto model = ModelSpec::baseline();
    const auto path = simulate_path(model, 10.0, 1000, 11, opt);
    double noise = 0.0;
    for (std::size_t i = 0; i < path.steps(); ++i)
      noise += path.diffusion_increments[i] + path.jump_increments[i];
    double jumps = 0.0;
    for (double z : path.jump_sizes)
      jumps += z;
    CHECK(std::accumulate(path.jump_increments.begin(), path.jump_increments.end(), 0.0) ==
          doctest::Approx(jumps).epsilon(1e-12));
    const double predicted =
        (path.x.back() - model.x0 - model.a0 * 10.0 - noise) / model.a1;
    CHECK(path.y.back() - path.y.front() == doctest::Approx(predicted).epsilon(1e-9));
  }
}

TEST_CASE("noiseless path converges to the ODE solution at first order")
{
  // dX = (1 - 10 X) dt from X0 = 1: X(t) = 0.1 + 0.9 e^{-10 t}.
  auto max_error = [](std::size_t n) {
    const auto path = simulate_path(deterministic(1.0, -10.0, 1.0), 2.0, n, 1);
    double err = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      const double t = path.delta * static_cast<double>(i);
      err = std::max(err, std::abs(path.x[i] - (0.1 + 0.9 * std::exp(-10.0 * t))));
    }
    return err;
  };
  const double e1 = max_error(1000);
  const double e2 = max_error(2000);
  CHECK(e1 < 0.02);
  CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("plain grid Euler makes the proxy the lagged latent value")
{
  const auto path = simulate_path(ModelSpec::baseline(), 10.0, 1000, 5);
  const auto proxy = build_proxy(path.y, path.delta);
  for (std::size_t i = 0; i < proxy.size(); ++i)
    CHECK(std::abs(proxy.values[i] - path.x[i]) < 1e-8);
}

TEST_CASE("proxy error shrinks with the sampling interval")
{
  auto worst = [](std::size_t n) {
    SimulationOptions opt;
    opt.substeps = 20;
    auto model = ModelSpec::baseline(0.0);
    double total = 0.0;
    for (std::uint64_t s = 0; s < 3; ++s) {
      const auto path = simulate_path(model, 10.0, n, stream_seed(5, s), opt);
      const auto proxy = build_proxy(path.y, path.delta);
      double err = 0.0;
      for (std::size_t i = 0; i < proxy.size(); ++i)
        err = std::max(err, std::abs(proxy.values[i] - path.x[i]));
      total += err;
    }
    return total;
  };
  const double e100 = worst(1000);
  const double e200 = worst(2000);
  const double e1000 = worst(10000);
  CHECK(e100 > e200);
  CHECK(e200 > e1000);
}

TEST_CASE("negative diffusion variance is clamped and counted")
{
  ModelSpec m = deterministic(0.0, 0.0, 0.0);
  m.b0 = -1.0;
  const auto clamped = simulate_path(m, 1.0, 100, 1);
  CHECK(clamped.negative_variance_steps == 100);
  CHECK(clamped.x.back() == 0.0);
  m.b0 = 0.1;
  m.b1 = 0.0;
  const auto ok = simulate_path(m, 1.0, 100, 1);
  CHECK(ok.negative_variance_steps == 0);
}

TEST_CASE("invalid arguments")
{
  const auto model = ModelSpec::baseline();
  CHECK_THROWS_AS(simulate_path(model, -1.0, 100, 1), ArgumentError);
  CHECK_THROWS_AS(simulate_path(model, 10.0, 0, 1), ArgumentError);
  ModelSpec bad = model;
  bad.jumps.size_std = -0.1;
  CHECK_THROWS_AS(simulate_path(bad, 10.0, 10, 1), ArgumentError);
}

TEST_CASE("true moments")
{
  const auto model = ModelSpec::baseline();
  const auto t0 = true_moments(model, 10.0, 0.0);
  CHECK(t0.m2 == doctest::Approx(0.1 + 2.0 * 0.036 * 0.036).epsilon(1e-14));
  CHECK(t0.mu == doctest::Approx(1.0));
  CHECK(t0.lambda == doctest::Approx(2.0));

  const auto nojump = true_moments(ModelSpec::baseline(0.0), 10.0, 0.3);
  CHECK(nojump.m2 == doctest::Approx(0.1 + 0.1 * 0.09).epsilon(1e-14));
  CHECK(nojump.c4 == 0.0);

  ModelSpec m = model;
  m.jumps.size_std = 0.1;
  const auto t = true_moments(m, 10.0, 0.2);
  CHECK(t.c4 == doctest::Approx(6e-4).epsilon(1e-12));
  CHECK(t.c6 == doctest::Approx(2.0 * 15.0 * 1e-6).epsilon(1e-12));
}

TEST_CASE("stream seeds are distinct and stable")
{
  CHECK(stream_seed(1, 0) == stream_seed(1, 0));
  CHECK(stream_seed(1, 0) != stream_seed(1, 1));
  CHECK(stream_seed(1, 0) != stream_seed(2, 0));
  auto a = make_engine(17);
  auto b = make_engine(17);
  CHECK(a() == b());
}
