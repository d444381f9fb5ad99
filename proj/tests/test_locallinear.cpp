#include "jdgamma/errors.hpp"
#include "jdgamma/locallinear.hpp"
#include "jdgamma/rng.hpp"
#include "jdgamma/simulate.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace jdgamma;

namespace {

struct Instance
{
  std::vector<double> w, d, r;
  KernelSpec kernel;
  double x = 0.0;
};

Instance random_instance(std::mt19937_64& rng)
{
  std::uniform_int_distribution<int> size(6, 50);
  std::uniform_real_distribution<double> pos(0.02, 1.0);
  std::uniform_real_distribution<double> resp(-3.0, 3.0);
  std::uniform_real_distribution<double> bw(0.08, 0.6);
  Instance in;
  const int n = size(rng);
  for (int i = 0; i < n; ++i) {
    in.w.push_back(pos(rng));
    in.d.push_back(pos(rng));
    in.r.push_back(resp(rng));
  }
  const double h = bw(rng);
  in.kernel = rng() % 2 ? KernelSpec::gamma(h) : KernelSpec::gaussian(h);
  in.x = std::uniform_real_distribution<double>(0.1, 0.9)(rng);
  return in;
}

double kernel_value(const KernelSpec& k, double u, double x)
{
  return k.family == KernelFamily::GammaAsymmetric ? gamma_kernel(u, x, k.bandwidth)
                                                   : gaussian_kernel(u, x, k.bandwidth);
}

// Brute-force weighted least squares via the 2x2 normal equations in long double.
std::pair<long double, long double> wls_oracle(const Instance& in)
{
  long double s0 = 0, s1 = 0, s2 = 0, t0 = 0, t1 = 0;
  for (std::size_t i = 0; i < in.d.size(); ++i) {
    const long double k = kernel_value(in.kernel, in.w[i], in.x);
    const long double z = static_cast<long double>(in.d[i]) - in.x;
    s0 += k;
    s1 += k * z;
    s2 += k * z * z;
    t0 += k * in.r[i];
    t1 += k * z * in.r[i];
  }
  const long double det = s0 * s2 - s1 * s1;
  return {(s2 * t0 - s1 * t1) / det, (s0 * t1 - s1 * t0) / det};
}

bool close(double got, long double want, double rel)
{
  return std::abs(static_cast<long double>(got) - want) <= rel * std::max(1.0L, std::abs(want));
}

} // namespace

TEST_CASE("constant and affine responses are reproduced")
{
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 200; ++rep) {
    auto in = random_instance(rng);
    std::vector<double> c(in.d.size(), 2.5), affine;
    for (double d : in.d)
      affine.push_back(3.0 - 10.0 * (d - in.x));
    const auto fc = local_linear_fit(in.w, in.d, c, in.kernel, in.x);
    CHECK(fc.intercept == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(std::abs(fc.slope) < 1e-9);
    const auto fa = local_linear_fit(in.w, in.d, affine, in.kernel, in.x);
    CHECK(close(fa.intercept, 3.0L, 1e-10));
    CHECK(close(fa.slope, -10.0L, 1e-10));
  }
}

TEST_CASE("fit matches the explicit weighted normal equations")
{
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 500; ++rep) {
    const auto in = random_instance(rng);
    const auto fit = local_linear_fit(in.w, in.d, in.r, in.kernel, in.x);
    const auto [a, b] = wls_oracle(in);
    CAPTURE(rep);
    CHECK(close(fit.intercept, a, 1e-10));
    CHECK(close(fit.slope, b, 1e-10));
  }
}

TEST_CASE("explicit weights are orthogonal to the design and give the intercept")
{
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 200; ++rep) {
    const auto in = random_instance(rng);
    const auto omega = local_linear_weights(in.w, in.d, in.kernel, in.x);
    long double cross = 0, scale = 0, mass = 0, num = 0;
    for (std::size_t i = 0; i < omega.size(); ++i) {
      cross += omega[i] * (in.d[i] - in.x);
      scale += std::abs(omega[i] * (in.d[i] - in.x));
      mass += omega[i];
      num += omega[i] * in.r[i];
    }
    CHECK(std::abs(cross) <= 1e-8 * scale);
    const auto fit = local_linear_fit(in.w, in.d, in.r, in.kernel, in.x);
    CHECK(close(fit.intercept, num / mass, 1e-9));
  }
}

TEST_CASE("scaling responses scales the fit")
{
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 50; ++rep) {
    auto in = random_instance(rng);
    const auto base = local_linear_fit(in.w, in.d, in.r, in.kernel, in.x);
    for (auto& r : in.r)
      r *= 4.0;
    const auto scaled = local_linear_fit(in.w, in.d, in.r, in.kernel, in.x);
    CHECK(scaled.intercept == 4.0 * base.intercept);
    CHECK(scaled.slope == 4.0 * base.slope);
  }
}

TEST_CASE("excluded block equals refitting without those rows")
{
  std::mt19937_64 rng(5);
  auto in = random_instance(rng);
  while (in.d.size() < 20)
    in = random_instance(rng);
  const ExcludedBlock block{4, 9};
  const auto held = local_linear_fit(in.w, in.d, in.r, in.kernel, in.x, {}, block);
  Instance cut = in;
  for (auto* v : {&cut.w, &cut.d, &cut.r})
    v->erase(v->begin() + 4, v->begin() + 9);
  const auto [a, b] = wls_oracle(cut);
  CHECK(close(held.intercept, a, 1e-10));
  CHECK(close(held.slope, b, 1e-10));
}

TEST_CASE("sparse and degenerate neighbourhoods raise")
{
  const std::vector<double> w{0.1, 0.12, 0.15, 0.2}, r{1, 2, 3, 4};
  CHECK_THROWS_AS(local_linear_fit(w, w, r, KernelSpec::gaussian(0.01), 5.0),
                  SparseRegionError);
  const std::vector<double> same(4, 0.2);
  CHECK_THROWS_AS(local_linear_fit(w, same, r, KernelSpec::gaussian(0.1), 0.2),
                  DegenerateDesignError);
  CHECK_THROWS_AS(local_linear_fit(w, w, r, KernelSpec::gamma(0.1), -0.1), DomainError);
}

TEST_CASE("curve mapping records failures instead of throwing")
{
  RegressionTriples t;
  t.delta = 1.0;
  t.weight_point = {0.1, 0.12, 0.15, 0.2};
  t.design_point = t.weight_point;
  t.drift_resp = {1, 2, 3, 4};
  t.var_resp = t.m4_resp = t.m6_resp = t.drift_resp;
  const std::vector<double> grid{0.15, 9.0};
  const auto c = estimate_drift_curve(t, KernelSpec::gaussian(0.05), grid);
  CHECK(c.ok(0));
  CHECK(c.status[1] == FitStatus::Sparse);
  CHECK(std::isnan(c.values[1]));
  const std::vector<double> far{9.0};
  CHECK_THROWS_AS(estimate_curve(t, Target::Drift, KernelSpec::gaussian(0.05), far),
                  NumericalError);
  CHECK_NOTHROW(map_local_fits(t, Target::Drift, KernelSpec::gaussian(0.05), far));
}

TEST_CASE("drift and conditional variance curves on the baseline model")
{
  const auto path = simulate_path(ModelSpec::baseline(), 10.0, 1000, 2024);
  const auto proxy = build_proxy(path.y, path.delta);
  const auto t = build_regression_triples(proxy);
  const auto [lo, hi] = std::minmax_element(proxy.values.begin(), proxy.values.end());
  const double a = *lo + 0.1 * (*hi - *lo), b = *hi - 0.1 * (*hi - *lo);
  std::vector<double> grid;
  for (int k = 0; k <= 40; ++k)
    grid.push_back(std::max(0.0, a) + (b - std::max(0.0, a)) * k / 40.0);

  const auto gamma = estimate_drift_curve(t, KernelSpec::gamma(0.0683), grid);
  const auto gauss = estimate_drift_curve(t, KernelSpec::gaussian(0.0683), grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    REQUIRE(gamma.ok(i));
    CHECK(std::abs(gamma.values[i] - (1.0 - 10.0 * grid[i])) < 0.6);
    if (gauss.ok(i) && grid[i] > 0.05 && grid[i] < 0.2)
      CHECK(std::abs(gamma.values[i] - gauss.values[i]) < 0.5);
  }

}

TEST_CASE("conditional variance curve when the level is a genuine time integral")
{
  // The 3/2 response factor assumes Y integrates X between observations, so
  // the path is simulated with Euler sub-steps here.
  SimulationOptions opt;
  opt.substeps = 20;
  const auto path = simulate_path(ModelSpec::baseline(), 10.0, 1000, 2024, opt);
  const auto t = build_regression_triples(build_proxy(path.y, path.delta));
  const std::vector<double> at{0.1};
  const auto m = estimate_m_curve(t, KernelSpec::gamma(0.0441), at);
  const double truth = 0.1 + 0.1 * 0.01 + 2 * 0.036 * 0.036;
  CHECK(std::abs(m.values[0] - truth) < 0.5 * truth);

  // Linearity in the responses.
  RegressionTriples scaled = t;
  for (auto& v : scaled.var_resp)
    v *= 3.0;
  const auto m3 = estimate_m_curve(scaled, KernelSpec::gamma(0.0441), at);
  CHECK(m3.values[0] == doctest::Approx(3.0 * m.values[0]).epsilon(1e-12));
}

TEST_CASE("grid Euler sampling inflates the conditional variance by the proxy factor")
{
  const auto path = simulate_path(ModelSpec::baseline(), 10.0, 1000, 2024);
  const auto t = build_regression_triples(build_proxy(path.y, path.delta));
  const std::vector<double> at{0.1};
  const auto m = estimate_m_curve(t, KernelSpec::gamma(0.0441), at);
  const double truth = 0.1 + 0.1 * 0.01 + 2 * 0.036 * 0.036;
  CHECK(std::abs(m.values[0] / 1.5 - truth) < 0.5 * truth);
}

TEST_CASE("noiseless paths give the drift and a vanishing variance")
{
  ModelSpec m;
  m.a0 = 0.2;
  m.a1 = -2.0;
  m.x0 = 0.6;
  const auto path = simulate_path(m, 0.5, 500, 1);
  const auto t = build_regression_triples(build_proxy(path.y, path.delta));
  const std::vector<double> grid{0.3, 0.4, 0.5};
  const auto drift = estimate_drift_curve(t, KernelSpec::gamma(0.02), grid);
  const auto var = estimate_m_curve(t, KernelSpec::gamma(0.02), grid);
  const auto m4 = estimate_moment_curve(t, KernelSpec::gamma(0.02), grid, 4);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(drift.values[i] - (0.2 - 2.0 * grid[i])) < 10.0 * path.delta);
    CHECK(std::abs(var.values[i]) < 10.0 * path.delta);
    CHECK(std::abs(m4.values[i]) < 10.0 * path.delta);
  }
  CHECK_THROWS_AS(estimate_moment_curve(t, KernelSpec::gamma(0.02), grid, 5), ArgumentError);
}

TEST_CASE("fourth-moment curve without jumps is of order delta")
{
  const auto path = simulate_path(ModelSpec::baseline(0.0), 10.0, 5000, 8);
  const auto t = build_regression_triples(build_proxy(path.y, path.delta));
  const std::vector<double> grid{0.1};
  const auto m4 = estimate_moment_curve(t, KernelSpec::gamma(0.03), grid, 4);
  // Diffusion alone contributes about 9 sigma^4 delta.
  CHECK(std::abs(m4.values[0]) < 20.0 * 0.0101 * 0.0101 * path.delta * 100.0);
  CHECK(std::abs(m4.values[0]) < 1e-3);
}

TEST_CASE("kernel density estimate")
{
  ProxySeries one;
  one.delta = 1.0;
  one.values = {0.4};
  CHECK(estimate_density(one, KernelSpec::gamma(0.1), 0.3) ==
        doctest::Approx(gamma_kernel(0.4, 0.3, 0.1)));

  std::mt19937_64 rng(12);
  std::exponential_distribution<double> e(1.0);
  ProxySeries p;
  p.delta = 1.0;
  for (int i = 0; i < 5000; ++i)
    p.values.push_back(e(rng));
  const double f = estimate_density(p, KernelSpec::gamma(0.05), 1.0);
  CHECK(std::abs(f - std::exp(-1.0)) < 0.1);
  CHECK(estimate_density(p, KernelSpec::gaussian(0.05), -3.0) >= 0.0);
  CHECK(estimate_density(p, KernelSpec::gamma(0.05), 0.0) >= 0.0);
}

TEST_CASE("second derivative from the local cubic")
{
  RegressionTriples t;
  t.delta = 1.0;
  for (int i = 0; i <= 400; ++i) {
    const double d = 0.05 + 0.9 * i / 400.0;
    t.weight_point.push_back(d);
    t.design_point.push_back(d);
  }
  const double x = 0.5;
  for (double d : t.design_point) {
    t.drift_resp.push_back(2.0 - 3.0 * (d - x));
    t.var_resp.push_back((d - x) * (d - x));
  }
  t.m4_resp = t.m6_resp = t.var_resp;
  const double lin = estimate_second_derivative(t, Target::Drift, KernelSpec::gamma(0.1), x);
  CHECK(std::abs(lin) < 1e-8 * 3.0);
  const double quad =
      estimate_second_derivative(t, Target::CondVariance, KernelSpec::gamma(0.1), x);
  CHECK(quad == doctest::Approx(2.0).epsilon(1e-6));
  const double quad_s =
      estimate_second_derivative(t, Target::CondVariance, KernelSpec::gaussian(0.1), x);
  CHECK(quad_s == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("curvature of the conditional variance on simulated data")
{
  // Single-seed curvature estimates scatter widely at this sample size, so
  // the median over seeds is compared with M'' = 0.2.
  SimulationOptions opt;
  opt.substeps = 20;
  std::vector<double> curv;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto path = simulate_path(ModelSpec::baseline(), 10.0, 5000, stream_seed(77, s), opt);
    const auto t = build_regression_triples(build_proxy(path.y, path.delta));
    curv.push_back(
        estimate_second_derivative(t, Target::CondVariance, KernelSpec::gamma(0.1), 0.15));
  }
  std::nth_element(curv.begin(), curv.begin() + 10, curv.end());
  CHECK(std::abs(curv[10] - 0.2) < 0.3);
}
