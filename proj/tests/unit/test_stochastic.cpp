#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "doctest.h"
#include "levylab/errors.hpp"
#include "levylab/heatkernel.hpp"
#include "levylab/linear_solver.hpp"
#include "levylab/stochastic.hpp"

using namespace levylab;
using std::numbers::pi;

namespace {

double ks_distance(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, std::abs(f - i / n), std::abs((i + 1) / n - f)});
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

struct MeanSe {
  double mean, se;
};

MeanSe mean_se(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= v.size();
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return {m, std::sqrt(s / (v.size() - 1) / v.size())};
}

double median(std::vector<double> v) {
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

// Symbol |xi| in d = 1.
SphericalMeasure cauchy_sigma() { return SphericalMeasure::isotropic(1, 2.0 / pi); }

}  // namespace

TEST_CASE("counter rng streams") {
  CounterRng a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
    CHECK(x != d());
  }
  // Neighbouring streams are uncorrelated.
  const int n = 100000;
  CounterRng s0(1, 0), s1(1, 1);
  double sxy = 0.0, sx = 0.0, sy = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = s0.uniform() - 0.5, y = s1.uniform() - 0.5;
    CHECK(x > -0.5);
    CHECK(x < 0.5);
    sxy += x * y, sx += x, sy += y;
  }
  const double corr = (sxy / n - sx / n * sy / n) * 12.0;
  CHECK(std::abs(corr) < 3.0 / std::sqrt(n));
  CHECK(std::abs(sx / n) < 3.0 * std::sqrt(1.0 / 12 / n));
}

TEST_CASE("alpha = 1 isotropic increments are Cauchy") {
  CounterRng rng(2024, 0);
  std::vector<double> xs(100000);
  for (auto& x : xs) x = sample_stable_increment(cauchy_sigma(), 1.0, 1.0, rng)[0];
  const double d = ks_distance(xs, [](double x) { return 0.5 + std::atan(x) / pi; });
  INFO("KS " << d);
  // 1% critical value 1.63 / sqrt(n).
  CHECK(d < 1.63 / std::sqrt(1e5));
}

TEST_CASE("characteristic function of a skewless pair") {
  // Pair +-1 of weight 0.6 each: E cos(u X_t) = e^{-t 1.2 C_alpha |u|^alpha}.
  const double alpha = 1.5, dt = 0.4;
  const auto sigma = SphericalMeasure::symmetric_pair({1.0}, 1.2);
  CounterRng rng(9, 3);
  std::vector<double> xs(100000);
  for (auto& x : xs) x = sample_stable_increment(sigma, alpha, dt, rng)[0];
  for (double u : {0.3, 1.0, 2.5}) {
    std::vector<double> c(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) c[i] = std::cos(u * xs[i]);
    const auto [m, se] = mean_se(c);
    const double exact = std::exp(-dt * 1.2 * radial_constant(alpha) * std::pow(u, alpha));
    INFO("u = " << u);
    // Three comparisons on one sample: 4 standard errors keeps the family-wise level near 3 sigma.
    CHECK(std::abs(m - exact) < 4 * se);
  }
}

TEST_CASE("positive stable Laplace transform") {
  for (double beta : {0.5, 0.75}) {
    CounterRng rng(5, 0);
    std::vector<double> a(100000);
    for (auto& v : a) {
      v = positive_stable(beta, rng);
      CHECK(v > 0.0);
    }
    for (double s : {0.2, 1.0, 3.0}) {
      std::vector<double> e(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) e[i] = std::exp(-s * a[i]);
      const auto [m, se] = mean_se(e);
      INFO("beta " << beta << ", s " << s);
      CHECK(std::abs(m - std::exp(-std::pow(s, beta))) < 3 * se);
    }
  }
}

TEST_CASE("isotropic 2d increments project to the right law") {
  // Projection onto a unit vector at alpha = 1: Cauchy of scale C_1 M m_1(2) = M.
  const auto sigma = SphericalMeasure::isotropic(2, 1.3);
  CounterRng rng(77, 1);
  std::vector<double> proj(100000);
  const double c = std::cos(0.4), s = std::sin(0.4);
  for (std::size_t i = 0; i < proj.size(); ++i) {
    const auto x = sample_stable_increment(sigma, 1.0, 1.0, rng);
    proj[i] = c * x[0] + s * x[1];
  }
  const double d = ks_distance(proj, [](double x) { return 0.5 + std::atan(x / 1.3) / pi; });
  INFO("KS " << d);
  CHECK(d < 1.63 / std::sqrt(1e5));
  // alpha = 1.4: characteristic function of the projection.
  CounterRng r2(78, 1);
  std::vector<double> cosv(100000);
  const double u = 0.8, alpha = 1.4;
  for (auto& v : cosv) {
    const auto x = sample_stable_increment(sigma, alpha, 0.5, r2);
    v = std::cos(u * x[1]);
  }
  const auto [m, se] = mean_se(cosv);
  const double exact = std::exp(-0.5 * radial_constant(alpha) * 1.3 * isotropic_moment(2, alpha) * std::pow(u, alpha));
  CHECK(std::abs(m - exact) < 3 * se);
}

TEST_CASE("increments are self-similar and symmetric") {
  const double alpha = 1.3, dt = 0.05;
  const auto sigma = SphericalMeasure::symmetric_pair({1.0}, 1.0);
  CounterRng r1(10, 0), r2(10, 1);
  std::vector<double> small(100000), unit(100000);
  for (auto& x : small) x = sample_stable_increment(sigma, alpha, dt, r1)[0];
  for (auto& x : unit) x = std::pow(dt, 1.0 / alpha) * sample_stable_increment(sigma, alpha, 1.0, r2)[0];
  const double d = ks_two_sample(small, unit);
  INFO("two-sample KS " << d);
  CHECK(d < 0.02);
  std::vector<double> sign(small.size()), neg(small.size());
  for (std::size_t i = 0; i < small.size(); ++i) sign[i] = small[i] > 0 ? 1.0 : -1.0, neg[i] = -small[i];
  const auto [m, se] = mean_se(sign);
  CHECK(std::abs(m) < 3 * se);
  CHECK(ks_two_sample(small, neg) < 0.02);
}

TEST_CASE("unsupported measures") {
  CounterRng rng(1, 1);
  const auto skew = SphericalMeasure::discrete({{{1.0}, 0.9}, {{-1.0}, 0.3}});
  CHECK_THROWS_AS(sample_stable_increment(skew, 1.5, 0.1, rng), UnsupportedMeasure);
  const auto dens = LevyMeasure::density(1, 1.0, {"constant", {1.0}});
  CHECK_THROWS_AS(sample_increment(dens, 0.1, rng), UnsupportedMeasure);
  // Direct sums are symmetric per axis.
  const auto ds = LevyMeasure::direct_sum(1.0, {1.0, 0.5});
  CHECK(sample_increment(ds, 0.1, rng).size() == 2);
}

TEST_CASE("euler path with zero drift is the sum of increments") {
  const auto m = LevyMeasure::stable(1.5, SphericalMeasure::isotropic(2, 1.0));
  std::vector<double> grid{0.0, 0.1, 0.25, 0.3, 0.6};
  CounterRng a(3, 9), b(3, 9);
  const std::vector<double> x0{1.0, -2.0};
  const auto path = euler_path(VectorField{}, m, x0, grid, a);
  std::vector<double> x = x0;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const auto inc = sample_increment(m, grid[k + 1] - grid[k], b);
    for (int i = 0; i < 2; ++i) x[i] += inc[i];
    CHECK(path.state(k + 1)[0] == x[0]);
    CHECK(path.state(k + 1)[1] == x[1]);
  }
}

TEST_CASE("euler path with constant drift") {
  std::vector<double> grid;
  for (int k = 0; k <= 20; ++k) grid.push_back(0.05 * k);
  const double theta = 0.7;
  const std::vector<double> x0{0.0};
  for (double alpha : {1.0, 1.6}) {
    const auto m = LevyMeasure::stable(alpha, SphericalMeasure::isotropic(1, 1.0));
    const auto ens = simulate_ensemble(VectorField::constant({theta}), m, x0, grid, 40000, 12);
    std::vector<double> disp(ens.n_paths);
    for (std::size_t i = 0; i < ens.n_paths; ++i) disp[i] = ens.state(i, grid.size() - 1)[0] - theta * 1.0;
    if (alpha > 1.0) {
      const auto [mean, se] = mean_se(disp);
      CHECK(std::abs(mean) < 3 * se);
    } else {
      // Cauchy of scale pi/2 at T = 1: the median has sd 1 / (2 f(0) sqrt n) = (pi/2) pi / (2 sqrt n).
      CHECK(std::abs(median(disp)) < 3 * (pi / 2) * pi / (2 * std::sqrt(40000.0)));
    }
  }
}

TEST_CASE("ensembles are reproducible and independent of the thread count") {
  const auto m = LevyMeasure::stable(1.2, SphericalMeasure::isotropic(1, 1.0));
  VectorField b;
  b.dim = 1;
  b.bound = 1.0;
  b.eval = [](double t, std::span<const double> x, std::span<double> out) { out[0] = std::sin(x[0] + t); };
  std::vector<double> grid{0.0, 0.1, 0.2, 0.3};
  const std::vector<double> x0{0.5};
  setenv("LEVYLAB_THREADS", "1", 1);
  const auto e1 = simulate_ensemble(b, m, x0, grid, 1000, 99);
  setenv("LEVYLAB_THREADS", "3", 1);
  const auto e3 = simulate_ensemble(b, m, x0, grid, 1000, 99);
  unsetenv("LEVYLAB_THREADS");
  CHECK(e1.states == e3.states);
  const auto again = simulate_ensemble(b, m, x0, grid, 1000, 99);
  CHECK(again.states == e1.states);
  const auto other = simulate_ensemble(b, m, x0, grid, 1000, 100);
  CHECK(other.states != e1.states);
}

TEST_CASE("non-finite drift is reported with its location") {
  const auto m = LevyMeasure::stable(1.2, SphericalMeasure::isotropic(1, 1.0));
  VectorField b;
  b.dim = 1;
  b.eval = [](double t, std::span<const double>, std::span<double> out) { out[0] = t > 0.15 ? NAN : 0.0; };
  CounterRng rng(1, 0);
  const std::vector<double> x0{0.0};
  try {
    euler_path(b, m, x0, {0.0, 0.1, 0.2, 0.3}, rng);
    FAIL("expected DriftEvaluationFailure");
  } catch (const DriftEvaluationFailure& e) {
    CHECK(e.time() == doctest::Approx(0.2));
    CHECK(e.point().size() == 1);
  }
}

TEST_CASE("feynman-kac trivial cases") {
  const Grid g(1, 64, 2 * pi);
  const auto m = LevyMeasure::stable(1.0, SphericalMeasure::isotropic(1, 1.0));
  const auto phi = GridField::constant(g, 1, 2.5);
  const std::vector<double> x{1.0};
  MonteCarloConfig cfg;
  cfg.paths = 2000;
  cfg.steps = 10;
  auto est = feynman_kac(phi, std::nullopt, VectorField::constant({0.4}), m, 0.7, x, cfg);
  CHECK(est.estimate == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(est.std_error == 0.0);
  cfg.lambda = 0.8;
  est = feynman_kac(phi, std::nullopt, VectorField{}, m, 0.7, x, cfg);
  CHECK(est.estimate == doctest::Approx(2.5 * std::exp(-0.56)).epsilon(1e-14));
}

TEST_CASE("feynman-kac without drift matches the semigroup") {
  const Grid g(1, 512, 2 * pi);
  const auto m = LevyMeasure::stable(1.5, SphericalMeasure::isotropic(1, 0.8));
  const auto phi = GridField::sample_scalar(g, [](std::span<const double> x) { return std::exp(std::sin(x[0])) + 0.3 * std::cos(3 * x[0]); });
  const double t = 0.4;
  const auto exact = semigroup_apply(m, t, phi);
  MonteCarloConfig cfg;
  cfg.paths = 40000;
  cfg.steps = 1;
  for (double x : {0.5, 2.0, 4.5}) {
    const std::vector<double> pt{x};
    const auto est = feynman_kac(phi, std::nullopt, VectorField{}, m, t, pt, cfg);
    const double ref = interpolate(exact, pt);
    INFO("x = " << x << ", estimate " << est.estimate << " +- " << est.std_error << ", exact " << ref);
    CHECK(std::abs(est.estimate - ref) < 3 * est.std_error);
  }
}

TEST_CASE("feynman-kac with drift and forcing matches drift_solve") {
  const Grid g(1, 256, 2 * pi);
  const auto m = LevyMeasure::stable(1.0, SphericalMeasure::isotropic(1, 0.6));
  VectorField b;
  b.dim = 1;
  b.bound = 0.8;
  b.eval = [](double, std::span<const double> x, std::span<double> out) { out[0] = 0.8 * std::sin(x[0]); };
  b.modulus = [](double r) { return 0.8 * r; };
  const auto phi = GridField::sample_scalar(g, [](std::span<const double> x) { return std::cos(x[0]); });
  std::vector<GridField> frames;
  for (int k = 0; k <= 10; ++k)
    frames.push_back(GridField::sample_scalar(g, [&](std::span<const double> x) { return 0.5 * std::sin(2 * x[0]) * (1 + 0.05 * k); }));
  const SpaceTimeField f(0.05, frames);
  const double T = 0.5;
  LinearProblem pb{m, b, 0.0, f, phi, T};
  SolverConfig sc;
  sc.time_step = 2e-3;
  const auto u = drift_solve(pb, sc);
  MonteCarloConfig cfg;
  cfg.paths = 40000;
  cfg.steps = 100;
  const std::vector<double> x{2.0};
  const auto est = feynman_kac(phi, f, b, m, T, x, cfg);
  const double ref = interpolate(u.back(), x);
  INFO("estimate " << est.estimate << " +- " << est.std_error << ", solver " << ref);
  CHECK(std::abs(est.estimate - ref) < std::max(3 * est.std_error, 1e-2));
}

TEST_CASE("standard error decays like n^-1/2") {
  const Grid g(1, 128, 2 * pi);
  const auto m = LevyMeasure::stable(1.5, SphericalMeasure::isotropic(1, 1.0));
  const auto phi = GridField::sample_scalar(g, [](std::span<const double> x) { return std::sin(x[0]); });
  MonteCarloConfig cfg;
  cfg.steps = 1;
  const std::vector<double> x{1.0};
  cfg.paths = 10000;
  const auto a = feynman_kac(phi, std::nullopt, VectorField{}, m, 0.3, x, cfg);
  cfg.paths = 40000;
  const auto b = feynman_kac(phi, std::nullopt, VectorField{}, m, 0.3, x, cfg);
  CHECK(a.std_error / b.std_error == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("krylov check trivial cases") {
  const Grid g(1, 64, 8.0);
  const auto m = LevyMeasure::stable(1.0, SphericalMeasure::isotropic(1, 1.0));
  const std::vector<double> x0{4.0};
  MonteCarloConfig cfg;
  cfg.paths = 500;
  cfg.steps = 20;
  const SpaceTimeField one(0.5, {GridField::constant(g, 1, 1.0), GridField::constant(g, 1, 1.0), GridField::constant(g, 1, 1.0)});
  const auto k1 = krylov_check(VectorField{}, m, one, 3.0, x0, cfg);
  CHECK(k1.lhs.estimate == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(k1.fnorm == doctest::Approx(std::pow(1.0 * 8.0, 1.0 / 3)).epsilon(1e-12));
  const SpaceTimeField zero(0.5, {GridField(g, 1), GridField(g, 1)});
  CHECK(krylov_check(VectorField{}, m, zero, 3.0, x0, cfg).lhs.estimate == 0.0);
  CHECK_THROWS_AS(krylov_check(VectorField{}, m, one, 2.0, x0, cfg), InvalidArgument);
}
