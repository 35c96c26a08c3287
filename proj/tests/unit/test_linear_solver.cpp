#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "levylab/errors.hpp"
#include "levylab/linear_solver.hpp"
#include "levylab/nonlocal_op.hpp"
#include "levylab/norms.hpp"

using namespace levylab;
using std::numbers::pi;

namespace {

LevyMeasure iso(int d, double alpha, double mass = 1.0) {
  return LevyMeasure::stable(alpha, SphericalMeasure::isotropic(d, mass));
}

LevyMeasure skew_1d(double alpha) {
  return LevyMeasure::stable(alpha, SphericalMeasure::discrete({{{1.0}, 0.9}, {{-1.0}, 0.3}}));
}

LevyMeasure two_atoms(double alpha) {
  return LevyMeasure::stable(alpha, SphericalMeasure::discrete({{{1.0, 0.0}, 0.8}, {{-0.6, 0.8}, 0.5}}));
}

SpaceTimeField frames_of(const Grid& g, double dt, int n,
                         const std::function<double(double, std::span<const double>)>& fn) {
  std::vector<GridField> frames;
  for (int k = 0; k <= n; ++k)
    frames.push_back(GridField::sample_scalar(g, [&](std::span<const double> x) { return fn(k * dt, x); }));
  return SpaceTimeField(dt, std::move(frames));
}

double rel(const GridField& a, const GridField& b) { return relative_l2_error(a, b); }

// Smooth periodic drift with |b| <= 1 built from a few random modes.
VectorField random_drift(std::mt19937& rng, double side) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::array<double, 6> c{};
  for (auto& v : c) v = u(rng);
  VectorField b;
  b.dim = 1;
  b.bound = 1.0;
  b.eval = [c, side](double t, std::span<const double> x, std::span<double> out) {
    const double s = 2 * pi * x[0] / side;
    const double raw = c[0] * std::sin(s + c[1]) + 0.5 * c[2] * std::cos(2 * s + c[3] + t) + 0.25 * c[4] * std::sin(3 * s + c[5]);
    out[0] = raw / 1.75;
  };
  const double lip = 2 * pi / side * 2.0;
  b.modulus = [lip](double r) { return lip * r; };
  return b;
}

}  // namespace

TEST_CASE("duhamel: zero data gives zero") {
  const Grid g(1, 64, 2 * pi);
  LinearProblem pb{iso(1, 1.0), DriftSchedule::constant({0.7}), 0.5, std::nullopt, GridField(g, 1), 1.0};
  const auto u = duhamel_solve(pb);
  for (const auto& fr : u.frames()) CHECK(lp_norm(fr, kInfinity) == 0.0);
}

TEST_CASE("duhamel: constant forcing") {
  const Grid g(2, 16, 4.0);
  const double c = 1.7, lambda = 2.0;
  const auto f = frames_of(g, 0.5, 2, [&](double, std::span<const double>) { return c; });
  LinearProblem pb{two_atoms(1.3), DriftSchedule::constant({0.3, -0.2}), lambda, f, GridField(g, 1), 1.0};
  SolverConfig cfg;
  cfg.time_step = 0.1;
  const auto u = duhamel_solve(pb, cfg);
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double t = k * u.time_step();
    const double exact = c * (1 - std::exp(-lambda * t)) / lambda;
    for (double v : u.frame(k).values()) CHECK(v == doctest::Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("duhamel: single mode against the scalar ODE") {
  // u' = -a u + F(t) with a = psi(k) + lambda + i k theta, F = 1 + 2t,
  // solved by hand: e^{-at} u0 + (1 - e^{-at})/a + 2 (t/a - (1 - e^{-at})/a^2).
  const Grid g(1, 64, 2 * pi);
  const auto m = skew_1d(1.4);
  const int k = 3;
  const double theta = 0.6, lambda = 0.4;
  const auto f = frames_of(g, 0.25, 4, [&](double t, std::span<const double> x) { return (1 + 2 * t) * std::cos(k * x[0]); });
  const auto phi = GridField::sample_scalar(g, [&](std::span<const double> x) { return std::sin(k * x[0]); });
  LinearProblem pb{m, DriftSchedule::constant({theta}), lambda, f, phi, 1.0};
  SolverConfig cfg;
  cfg.time_step = 0.05;
  const auto u = duhamel_solve(pb, cfg);
  const Complex a = symbol(m, std::vector<double>{double(k)}) + lambda + Complex(0, k * theta);
  for (std::size_t n = 0; n < u.size(); n += 5) {
    const double t = n * u.time_step();
    const Complex ea = std::exp(-a * t);
    const Complex amp_f = (1.0 - ea) / a + 2.0 * (t / a - (1.0 - ea) / (a * a));
    const Complex amp_phi = Complex(0, -1) * ea;  // sin = Re(-i e^{ikx})
    auto exact = GridField::sample_scalar(g, [&](std::span<const double> x) {
      return std::real(std::exp(Complex(0, k * x[0])) * (amp_f + amp_phi));
    });
    INFO("t = " << t);
    CHECK(lp_norm(u.frame(n) - exact, kInfinity) < 1e-8);
  }
}

TEST_CASE("duhamel: time-varying drift uses exact step averages") {
  // Steps aligned with the schedule make each step exact for that piece.
  const Grid g(1, 32, 2 * pi);
  const auto m = iso(1, 0.8);
  const auto drift = DriftSchedule::piecewise(0.2, {{1.0}, {-0.5}, {2.0}, {0.0}, {1.5}}, 2.0);
  const auto phi = GridField::sample_scalar(g, [](std::span<const double> x) { return std::cos(2 * x[0]) + 0.3 * std::sin(5 * x[0]); });
  LinearProblem pb{m, drift, 0.0, std::nullopt, phi, 1.0};
  SolverConfig cfg;
  cfg.time_step = 0.2;
  const auto u = duhamel_solve(pb, cfg);
  CHECK(rel(u.back(), shifted_propagator(m, drift, 1.0, 0.0, phi)) < 1e-12);
}

TEST_CASE("drift_solve: constant drift agrees with duhamel") {
  // +b . grad u with b = -theta is the -theta . grad u of the propagator.
  const Grid g(1, 128, 2 * pi);
  const auto m = skew_1d(1.0);
  const double theta = 0.8;
  const auto phi = GridField::sample_scalar(g, [](std::span<const double> x) { return std::exp(std::cos(x[0])); });
  const auto f = frames_of(g, 0.1, 10, [](double t, std::span<const double> x) { return std::sin(x[0] - t); });
  LinearProblem dpb{m, DriftSchedule::constant({theta}), 0.3, f, phi, 1.0};
  LinearProblem bpb{m, VectorField::constant({-theta}), 0.3, f, phi, 1.0};
  SolverConfig cfg;
  cfg.time_step = 0.1;
  const auto ud = duhamel_solve(dpb, cfg);
  cfg.time_step = 2e-3;
  cfg.picard_tol = 1e-13;
  const auto ub = drift_solve(bpb, cfg);
  const double err = rel(ub.back(), ud.back());
  INFO("relative L2 " << err);
  CHECK(err < 1e-6);
}

TEST_CASE("drift_solve: constants are stationary") {
  const Grid g(2, 32, 2 * pi);
  VectorField b;
  b.dim = 2;
  b.bound = 1.5;
  b.eval = [](double t, std::span<const double> x, std::span<double> out) {
    out[0] = std::sin(x[1] + t);
    out[1] = std::cos(x[0]);
  };
  b.modulus = [](double r) { return std::sqrt(2.0) * r; };
  LinearProblem pb{two_atoms(1.0), b, 0.0, std::nullopt, GridField::constant(g, 1, 3.25), 0.5};
  SolverConfig cfg;
  cfg.time_step = 0.02;
  const auto u = drift_solve(pb, cfg);
  for (const auto& fr : u.frames())
    for (double v : fr.values()) CHECK(v == doctest::Approx(3.25).epsilon(1e-13));
}

TEST_CASE("drift_solve: maximum principle for nonpositive forcing") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Grid g(1, 128, 2 * pi);
  for (int trial = 0; trial < 4; ++trial) {
    const auto b = random_drift(rng, g.side());
    const double c1 = u(rng), c2 = u(rng);
    const auto f = frames_of(g, 0.05, 20, [&](double t, std::span<const double> x) {
      return -c1 * std::pow(std::sin(0.5 * x[0] + t), 2) - c2 * (1 + std::cos(x[0]));
    });
    const auto phi = GridField::sample_scalar(g, [&](std::span<const double> x) { return std::exp(-4 * std::pow(std::sin(0.5 * (x[0] - c1)), 2)); });
    LinearProblem pb{iso(1, 1.0), b, 0.0, f, phi, 1.0};
    SolverConfig cfg;
    cfg.time_step = 5e-3;
    const auto sol = drift_solve(pb, cfg);
    double sup = -1e300;
    for (const auto& fr : sol.frames())
      for (double v : fr.values()) sup = std::max(sup, v);
    INFO("sup u - sup phi = " << sup - lp_norm(phi, kInfinity));
    CHECK(sup <= lp_norm(phi, kInfinity) + 1e-6);
  }
}

TEST_CASE("drift_solve: large steps fail to converge") {
  const Grid g(1, 256, 2 * pi);
  const auto phi = GridField::sample_scalar(g, [](std::span<const double> x) { return std::sin(x[0]) + 0.1 * std::sin(100 * x[0]); });
  LinearProblem pb{iso(1, 1.0), VectorField::constant({5.0}), 0.0, std::nullopt, phi, 1.0};
  SolverConfig cfg;
  cfg.time_step = 0.1;
  cfg.max_iterations = 20;
  try {
    drift_solve(pb, cfg);
    FAIL("expected IterationFailure");
  } catch (const IterationFailure& e) {
    CHECK(e.residuals().size() <= 20);
    CHECK(e.last_residual() > cfg.picard_tol);
  }
}

TEST_CASE("drift_solve: invariant under halving a small mollifier width") {
  std::mt19937 rng(5);
  const Grid g(1, 1024, 2 * pi);
  const auto b = random_drift(rng, g.side());
  const auto phi = GridField::sample_scalar(g, [](std::span<const double> x) { return std::cos(x[0]) + 0.5 * std::sin(2 * x[0]); });
  LinearProblem pb{skew_1d(1.0), b, 0.0, std::nullopt, phi, 0.5};
  SolverConfig cfg;
  cfg.time_step = 2e-3;
  cfg.mollifier_width = 4 * g.spacing();
  const auto u1 = drift_solve(pb, cfg);
  cfg.mollifier_width = 2 * g.spacing();
  const auto u2 = drift_solve(pb, cfg);
  const double err = rel(u1.back(), u2.back());
  INFO("relative L2 " << err);
  CHECK(err < 1e-4);
}

TEST_CASE("drift validation") {
  const Grid g(1, 64, 2 * pi);
  VectorField b;
  b.dim = 1;
  b.bound = 1.0;
  b.eval = [](double, std::span<const double> x, std::span<double> out) { out[0] = std::sin(4 * x[0]); };
  b.modulus = [](double r) { return r; };  // too small: the true Lipschitz constant is 4
  LinearProblem pb{iso(1, 1.0), b, 0.0, std::nullopt, GridField(g, 1), 1.0};
  CHECK_THROWS_AS(validate(pb), InvalidArgument);
  b.modulus = [](double r) { return 4 * r; };
  pb.drift = b;
  CHECK_NOTHROW(validate(pb));
  b.bound = 0.5;
  pb.drift = b;
  CHECK_THROWS_AS(validate(pb), DriftEvaluationFailure);
  b.bound = 1.0;
  b.eval = [](double, std::span<const double>, std::span<double> out) { out[0] = NAN; };
  pb.drift = b;
  CHECK_THROWS_AS(validate(pb), DriftEvaluationFailure);
  pb.drift = VectorField::constant({0.0});
  pb.lambda = -1.0;
  CHECK_THROWS_AS(validate(pb), InvalidArgument);
  CHECK_THROWS_AS(validate(SolverConfig{2.0, 0.0, 1e-10, 50}, 1.0), InvalidArgument);
}

TEST_CASE("rescaled problem has the rescaled solution") {
  // u^r(t, x) = u(r^alpha t, r x) solves the problem with drift r^(alpha-1) theta
  // and forcing r^alpha f(r^alpha t, r x) on the torus of side L / r.
  const double alpha = 1.5, L = 8.0, T = 0.5, theta = 0.7;
  const auto m = skew_1d(alpha);
  auto f = [&](double t, double x) { return std::sin(2 * pi * x / L - t) * std::exp(std::cos(2 * pi * x / L)); };
  auto phi = [&](double x) { return std::cos(4 * pi * x / L); };
  const Grid g(1, 64, L);
  LinearProblem base{m, DriftSchedule::constant({theta}), 0.0,
                     frames_of(g, T / 20, 20, [&](double t, std::span<const double> x) { return f(t, x[0]); }),
                     GridField::sample_scalar(g, [&](std::span<const double> x) { return phi(x[0]); }), T};
  SolverConfig cfg;
  cfg.time_step = T / 20;
  cfg.picard_tol = 1e-6;
  const auto u = duhamel_solve(base, cfg);
  for (double r : {0.5, 2.0}) {
    const double ra = std::pow(r, alpha), Tr = T / ra;
    const Grid gr(1, 64, L / r);
    LinearProblem scaled{m, DriftSchedule::constant({std::pow(r, alpha - 1) * theta}), 0.0,
                         frames_of(gr, Tr / 20, 20, [&](double t, std::span<const double> x) { return ra * f(ra * t, r * x[0]); }),
                         GridField::sample_scalar(gr, [&](std::span<const double> x) { return phi(r * x[0]); }), Tr};
    cfg.time_step = Tr / 20;
    const auto ur = duhamel_solve(scaled, cfg);
    const auto& last = ur.back();
    GridField mapped(g, 1, std::vector<double>(last.values().begin(), last.values().end()));
    const double err = rel(mapped, u.back());
    INFO("r = " << r << ", relative L2 " << err);
    CHECK(err < 1e-5);
  }
}

TEST_CASE("regularity ratio") {
  const Grid g(1, 32, 2 * pi);
  const auto nu1 = skew_1d(1.2);
  const auto nu2 = iso(1, 1.2, 0.7);
  SUBCASE("single mode matches the closed form") {
    const int k = 4, periods = 2;
    const double T = 1.0, omega = 2 * pi * periods / T;
    const int n = 4000;
    const auto f = frames_of(g, T / n, n, [&](double t, std::span<const double> x) { return std::cos(k * x[0] + omega * t); });
    for (double lambda : {0.0, 3.0}) {
      for (double p : {2.0, 4.0}) {
        const double ratio = regularity_ratio(nu1, nu2, lambda, f, p, p);
        const std::vector<double> kv{double(k)};
        const double exact = std::abs(symbol(nu2, kv)) / std::abs(symbol(nu1, kv) + Complex(lambda, omega));
        INFO("lambda " << lambda << ", p " << p);
        CHECK(ratio == doctest::Approx(exact).epsilon(1e-6));
      }
    }
  }
  SUBCASE("homogeneous of degree zero in f") {
    const auto f = frames_of(g, 0.05, 20, [](double t, std::span<const double> x) { return std::sin(3 * x[0]) * (1 + t) + std::cos(x[0] - t); });
    std::vector<GridField> scaled;
    for (const auto& fr : f.frames()) scaled.push_back(-3.5 * fr);
    const double r1 = regularity_ratio(nu1, nu2, 1.0, f, 2.0, 3.0);
    const double r2 = regularity_ratio(nu1, nu2, 1.0, SpaceTimeField(0.05, scaled), 2.0, 3.0);
    CHECK(r2 == doctest::Approx(r1).epsilon(1e-6));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(regularity_ratio(nu1, nu2, 0.0, SpaceTimeField(0.1, {GridField(g, 1), GridField(g, 1)}), 2, 2),
                    InvalidArgument);
    const Grid g2(2, 16, 2 * pi);
    const auto line = LevyMeasure::stable(1.2, SphericalMeasure::symmetric_pair({1.0, 0.0}, 1.0));
    const auto f2 = frames_of(g2, 0.1, 2, [](double, std::span<const double> x) { return std::sin(x[1]); });
    CHECK_THROWS_AS(regularity_ratio(line, line, 0.0, f2, 2, 2), PreconditionFailure);
  }
}

TEST_CASE("comparison ratio") {
  const Grid g(2, 32, 2 * pi);
  const auto u = GridField::sample_scalar(g, [](std::span<const double> x) { return std::sin(x[0]) * std::cos(2 * x[1]) + 0.2 * std::cos(3 * x[0]); });
  const auto nu1 = two_atoms(1.0), nu2 = LevyMeasure::stable(1.0, SphericalMeasure::isotropic(2, 2.0));
  CHECK(comparison_ratio(nu1, nu1, 1.5, 1.5, u) == doctest::Approx(0.5).epsilon(1e-14));
  const auto mode = GridField::sample_scalar(g, [](std::span<const double> x) { return std::cos(2 * x[0] - x[1]); });
  const std::vector<double> k{2.0, -1.0};
  const double lam = 0.8;
  const double exact = std::abs(symbol(nu2, k) + lam) / (2 * std::abs(symbol(nu1, k) + lam));
  // Even p: the grid sum of |cos|^p is exactly shift invariant.
  for (double p : {2.0, 4.0}) CHECK(comparison_ratio(nu1, nu2, lam, lam, mode, p) == doctest::Approx(exact).epsilon(1e-10));
  CHECK_THROWS_AS(comparison_ratio(nu1, nu2, 1.0, 1.0, GridField(g, 1)), InvalidArgument);
  CHECK_THROWS_AS(comparison_ratio(nu1, nu2, 0.0, 1.0, u), InvalidArgument);
}

TEST_CASE("riesz ratio on a single mode") {
  // For alpha = 1 the ratio is |psi(k)| / |k| on e^{ik.x}.
  const Grid g(2, 32, 2 * pi);
  const auto m = two_atoms(1.0);
  const auto mode = GridField::sample_scalar(g, [](std::span<const double> x) { return std::sin(3 * x[0] + x[1]); });
  const std::vector<double> k{3.0, 1.0};
  CHECK(riesz_ratio(m, mode) == doctest::Approx(std::abs(symbol(m, k)) / std::sqrt(10.0)).epsilon(1e-10));
  CHECK_THROWS_AS(riesz_ratio(m, GridField::constant(g, 1, 1.0)), InvalidArgument);
}

TEST_CASE("a-priori estimate constant is stable under refinement") {
  // sup_t |u|_{1/2,2}^2 + int |grad u|_2^2 against |phi|_{1/2,2}^2 + int |f|_2^2, alpha = 1.
  auto ratio = [](int n) {
    const Grid g(1, n, 2 * pi);
    std::mt19937 rng(3);
    const auto b = random_drift(rng, g.side());
    const auto f = frames_of(g, 0.05, 10, [](double t, std::span<const double> x) { return std::exp(std::sin(x[0] + t)) - 1.0; });
    const auto phi = GridField::sample_scalar(g, [](std::span<const double> x) { return std::exp(-2 * std::pow(std::sin(0.5 * x[0]), 2)); });
    LinearProblem pb{iso(1, 1.0), b, 0.0, f, phi, 0.5};
    SolverConfig cfg;
    cfg.time_step = 2e-3;
    const auto u = drift_solve(pb, cfg);
    double sup = 0.0, grad = 0.0, force = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
      sup = std::max(sup, std::pow(slobodeckij_norm(u.frame(k), 0.5, 2.0), 2));
      const double w = (k == 0 || k + 1 == u.size()) ? 0.5 : 1.0;
      grad += w * u.time_step() * std::pow(gradient_lp_norm(u.frame(k), 2.0), 2);
      force += w * u.time_step() * std::pow(lp_norm(f.at_time(k * u.time_step()), 2.0), 2);
    }
    return (sup + grad) / (std::pow(slobodeckij_norm(phi, 0.5, 2.0), 2) + force);
  };
  const double c1 = ratio(64), c2 = ratio(128);
  INFO("C(64) = " << c1 << ", C(128) = " << c2);
  CHECK(c2 == doctest::Approx(c1).epsilon(0.1));
}
