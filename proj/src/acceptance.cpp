#include "levylab/acceptance.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <numeric>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "levylab/errors.hpp"
#include "levylab/heatkernel.hpp"
#include "levylab/levy.hpp"
#include "levylab/linear_solver.hpp"
#include "levylab/nonlocal_op.hpp"
#include "levylab/norms.hpp"
#include "levylab/quasilinear.hpp"
#include "levylab/spectral.hpp"
#include "levylab/stochastic.hpp"

namespace levylab {
namespace {

using std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records a measured value next to its threshold and folds it into pass.
  void require(const std::string& key, double value, bool ok) {
    detail << (detail.tellp() > 0 ? " " : "") << key << "=" << std::setprecision(3) << value;
    if (!ok) {
      detail << "(!)";
      pass = false;
    }
  }
  void note(const std::string& key, double value) {
    detail << (detail.tellp() > 0 ? " " : "") << key << "=" << std::setprecision(3) << value;
  }
};

LevyMeasure iso(int d, double alpha, double mass = 1.0) {
  return LevyMeasure::stable(alpha, SphericalMeasure::isotropic(d, mass));
}

GridField scalar(const Grid& g, const std::function<double(std::span<const double>)>& fn) {
  return GridField::sample_scalar(g, fn);
}

double min_image(double x, double side) { return x > 0.5 * side ? x - side : x; }

// int_0^inf (1 - cos(s r)) r^-2 dr by tanh-sinh on a whole number of periods
// and Ooura's Fourier rule on the tail.
double cosine_gap_integral(double s) {
  const double a = 16.0 * pi / s;
  boost::math::quadrature::tanh_sinh<double> ts;
  const double head = ts.integrate(
      [s](double r) {
        const double z = s * r;
        if (z < 1e-4) return 0.5 * s * s * (1.0 - z * z / 12.0);
        return 2.0 * std::pow(std::sin(0.5 * z), 2) / (r * r);
      },
      0.0, a, 1e-15);
  boost::math::quadrature::ooura_fourier_cos<double> oc(1e-14);
  const double cos_tail = oc.integrate([a](double t) { return 1.0 / ((a + t) * (a + t)); }, s).first;
  return head + 1.0 / a - cos_tail;
}

Outcome symbol_isotropic() {
  Outcome out;
  const auto m = iso(1, 1.0, 1.0);
  double worst_closed = 0.0, worst_oracle = 0.0;
  for (int i = -100; i <= 100; ++i) {
    const double xi = 0.5 * i;
    const double x[1] = {xi};
    const Complex psi = symbol(m, x);
    if (xi == 0.0) {
      worst_closed = std::max(worst_closed, std::abs(psi));
      continue;
    }
    const double closed = 0.5 * pi * std::abs(xi);
    const double oracle = cosine_gap_integral(std::abs(xi));
    worst_closed = std::max(worst_closed, std::abs(psi - closed) / closed);
    worst_oracle = std::max(worst_oracle, std::abs(psi - oracle) / oracle);
  }
  out.require("rel_err_vs_pi/2|xi|", worst_closed, worst_closed < 1e-8);
  out.require("rel_err_vs_quadrature", worst_oracle, worst_oracle < 1e-8);
  return out;
}

Outcome route_equivalence() {
  Outcome out;
  const auto two_atoms = [](double a) {
    return LevyMeasure::stable(a, SphericalMeasure::discrete({{{1.0, 0.0}, 0.8}, {{-0.6, 0.8}, 0.5}}));
  };
  double worst = 0.0;
  for (double alpha : {0.5, 1.0, 1.5}) {
    const Grid g1(1, 256, 20.0), g2(2, 64, 12.0);
    const std::vector<std::pair<LevyMeasure, Grid>> cases{
        {iso(1, alpha), g1}, {two_atoms(alpha), g2}, {LevyMeasure::direct_sum(alpha, {1.0, 0.4}), g2}};
    for (const auto& [m, g] : cases) {
      const double c = 0.5 * g.side();
      const auto f = scalar(g, [&](std::span<const double> x) {
        double r2 = 0.0;
        for (double v : x) r2 += (v - c) * (v - c);
        return std::exp(-r2);
      });
      worst = std::max(worst, relative_l2_error(apply(m, f, OperatorRoute::quadrature()), apply(m, f)));
    }
  }
  out.require("max_rel_l2", worst, worst < 1e-3);
  return out;
}

Outcome kernel_cauchy() {
  Outcome out;
  const int n = 1024;
  const double side = 200.0;
  // psi = |xi| in d = 1 needs total mass 2 / pi.
  const auto m = iso(1, 1.0, 2.0 / pi);
  const Grid g(1, n, side);
  std::vector<double> x(1);
  double literal = 0.0, floor = 0.0, wrapped = 0.0, mass_err = 0.0, scaling = 0.0;
  for (double t : {0.5, 1.0, 2.0}) {
    const auto p = kernel(m, t, g);
    const auto p1 = kernel(m, 1.0, Grid(1, n, side / t));
    double l1 = 0.0, mass = 0.0, l1_wrapped = 0.0, l1_scale = 0.0;
    const double a = 2 * pi * t / side;
    for (std::size_t i = 0; i < g.size(); ++i) {
      g.point(i, x);
      const double y = min_image(x[0], side);
      const double free = t / (pi * (t * t + y * y));
      const double torus = std::sinh(a) / (side * (std::cosh(a) - std::cos(2 * pi * y / side)));
      l1 += std::abs(p(0, i) - free) * g.spacing();
      l1_wrapped += std::abs(p(0, i) - torus) * g.spacing();
      l1_scale += std::abs(p(0, i) - p1(0, i) / t) * g.spacing();
      mass += p(0, i) * g.spacing();
    }
    literal = std::max(literal, l1);
    wrapped = std::max(wrapped, l1_wrapped);
    mass_err = std::max(mass_err, std::abs(mass - 1.0));
    scaling = std::max(scaling, l1_scale);
    floor = std::max(floor, 1.0 - 2.0 / pi * std::atan(0.5 * side / t));
  }
  out.require("l1_vs_unwrapped", literal, literal < 1e-3);
  out.require("mass_err", mass_err, mass_err < 1e-6);
  out.require("scaling_l1", scaling, scaling < 1e-4);
  out.note("unit_mass_l1_floor", floor);
  out.note("l1_vs_periodized", wrapped);
  return out;
}

VectorField random_drift(std::mt19937& rng, double side) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::array<double, 6> c{};
  for (auto& v : c) v = u(rng);
  VectorField b;
  b.dim = 1;
  b.bound = 1.0;
  b.eval = [c, side](double t, std::span<const double> x, std::span<double> out) {
    const double s = 2 * pi * x[0] / side;
    out[0] = (c[0] * std::sin(s + c[1]) + 0.5 * c[2] * std::cos(2 * s + c[3] + t) + 0.25 * c[4] * std::sin(3 * s + c[5])) /
             1.75;
  };
  const double lip = 4 * pi / side;
  b.modulus = [lip](double r) { return lip * r; };
  return b;
}

Outcome max_principle() {
  Outcome out;
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Grid g(1, 128, 2 * pi);
  double worst = -1e300;
  for (int trial = 0; trial < 10; ++trial) {
    const auto b = random_drift(rng, g.side());
    const double c1 = u(rng), c2 = u(rng), c3 = 2 * pi * u(rng);
    std::vector<GridField> frames;
    for (int k = 0; k <= 20; ++k) {
      const double t = 0.05 * k;
      frames.push_back(scalar(g, [&](std::span<const double> x) {
        return -c1 * std::pow(std::sin(0.5 * x[0] + t), 2) - c2 * (1 + std::cos(x[0] - c3));
      }));
    }
    const auto phi = scalar(g, [&](std::span<const double> x) {
      return std::exp(-4 * std::pow(std::sin(0.5 * (x[0] - c3)), 2)) - 0.5 * c2;
    });
    LinearProblem pb{iso(1, 1.0), b, 0.0, SpaceTimeField(0.05, frames), phi, 1.0};
    SolverConfig cfg;
    cfg.time_step = 5e-3;
    const auto sol = drift_solve(pb, cfg);
    double sup_phi = -1e300, sup_u = -1e300;
    for (double v : phi.values()) sup_phi = std::max(sup_phi, v);
    for (const auto& fr : sol.frames())
      for (double v : fr.values()) sup_u = std::max(sup_u, v);
    worst = std::max(worst, sup_u - sup_phi);
  }
  out.require("max(sup_u-sup_phi)", worst, worst <= 1e-6);
  return out;
}

Outcome maximal_regularity() {
  Outcome out;
  // Side 1 puts the forced band |k| = 6..10 at xi ~ 38..63, where psi1 dominates lambda <= 100.
  const Grid g(1, 32, 1.0);
  const std::vector<std::pair<LevyMeasure, LevyMeasure>> pairs{
      {iso(1, 1.0, 4.0), LevyMeasure::stable(1.0, SphericalMeasure::discrete({{{1.0}, 0.9}, {{-1.0}, 0.3}}))},
      {iso(1, 1.5, 1.0), iso(1, 1.5, 2.0)},
      {LevyMeasure::direct_sum(1.2, {3.0}), iso(1, 1.0, 1.0)}};
  const std::vector<double> lambdas{0.0, 1.0, 10.0, 100.0};
  auto frames_of = [&](int n, const std::function<double(double, double)>& fn) {
    std::vector<GridField> frames;
    for (int k = 0; k <= n; ++k)
      frames.push_back(scalar(g, [&](std::span<const double> x) { return fn(static_cast<double>(k) / n, x[0]); }));
    return SpaceTimeField(1.0 / n, std::move(frames));
  };

  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst_spread = 0.0, worst_mode = 0.0;
  for (const auto& [nu1, nu2] : pairs) {
    for (int trial = 0; trial < 5; ++trial) {
      std::array<double, 12> c{};
      for (auto& v : c) v = U(rng);
      const auto f = frames_of(200, [&](double t, double x) {
        double s = 0.0;
        for (int j = 0; j < 4; ++j) {
          const int k = 6 + static_cast<int>(c[3 * j] * 5.0);
          const int w = static_cast<int>(c[3 * j + 1] * 3.0);
          s += (0.2 + c[3 * j + 2]) * std::cos(2 * pi * (k * x + w * t) + 7.0 * c[3 * j]);
        }
        return s;
      });
      double lo = 1e300, hi = 0.0;
      for (double lambda : lambdas) {
        const double r = regularity_ratio(nu1, nu2, lambda, f, 2.0, 2.0);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
      worst_spread = std::max(worst_spread, hi / lo);
    }
    const int k = 7, w = 1;
    const auto mode = frames_of(4000, [&](double t, double x) { return std::cos(2 * pi * (k * x + w * t)); });
    const std::vector<double> xi{2 * pi * k};
    for (double lambda : lambdas) {
      const double r = regularity_ratio(nu1, nu2, lambda, mode, 2.0, 2.0);
      const double exact = std::abs(symbol(nu2, xi)) / std::abs(symbol(nu1, xi) + Complex(lambda, 2 * pi * w));
      worst_mode = std::max(worst_mode, std::abs(r / exact - 1.0));
    }
  }
  out.require("max_spread_over_lambda", worst_spread, worst_spread < 2.0);
  out.require("single_mode_rel_err", worst_mode, worst_mode < 1e-6);
  return out;
}

Outcome riesz_equivalence() {
  Outcome out;
  const Grid g(2, 32, 2 * pi);
  const auto m = LevyMeasure::stable(
      1.0, SphericalMeasure::discrete({{{1.0, 0.0}, 0.6}, {{-1.0, 0.0}, 0.6}, {{0.6, 0.8}, 0.3}, {{-0.6, -0.8}, 0.3},
                                       {{-0.8, 0.6}, 0.15}, {{0.8, -0.6}, 0.15}}));
  auto family = [&](unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> K(-6, 6);
    std::uniform_real_distribution<double> A(-1.0, 1.0);
    std::vector<GridField> fields;
    while (fields.size() < 20) {
      std::array<std::array<double, 4>, 4> modes{};
      for (auto& md : modes) md = {double(K(rng)), double(K(rng)), A(rng), 3.0 * A(rng)};
      auto f = scalar(g, [&](std::span<const double> x) {
        double s = 0.0;
        for (const auto& md : modes) s += md[2] * std::cos(md[0] * x[0] + md[1] * x[1] + md[3]);
        return s;
      });
      if (gradient_lp_norm(f, 2.0) > 1e-8) fields.push_back(std::move(f));
    }
    return fields;
  };
  double lo = 1e300, hi = 0.0;
  for (const auto& f : family(1)) {
    const double r = riesz_ratio(m, f);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  double worst = 0.0;
  for (const auto& f : family(2)) {
    const double r = riesz_ratio(m, f);
    worst = std::max({worst, lo / r, r / hi});
  }
  out.note("c_lo", lo);
  out.note("c_hi", hi);
  out.require("validation_excess", worst, worst <= 1.1);
  return out;
}

Outcome analytic_semigroup() {
  Outcome out;
  const auto m = iso(1, 1.0);
  const std::vector<std::function<double(double)>> fields{
      [](double x) { return (x > 1.0 && x < 3.0) ? 1.0 : 0.0; },
      [](double x) { return std::exp(-std::pow((x - pi) / 0.3, 2)); },
      [](double x) { return std::sqrt(std::abs(std::sin(x))); }};
  auto sup_ratio = [&](int n, const std::function<double(double)>& fn) {
    const Grid g(1, n, 2 * pi);
    const auto f = scalar(g, [&](std::span<const double> x) { return fn(x[0]); });
    double s = 0.0;
    for (int i = 0; i <= 40; ++i) {
      const double t = std::pow(10.0, -2.0 + 2.0 * i / 40.0);
      s = std::max(s, t * lp_norm(apply(m, semigroup_apply(m, t, f)), 2.0) / lp_norm(f, 2.0));
    }
    return s;
  };
  double worst = 0.0, largest = 0.0;
  for (const auto& fn : fields) {
    const double a = sup_ratio(128, fn), b = sup_ratio(256, fn);
    largest = std::max({largest, a, b});
    worst = std::max(worst, std::abs(b / a - 1.0));
  }
  out.require("max_t*|LP_t f|/|f|", largest, std::isfinite(largest));
  out.require("refinement_change", worst, worst < 0.2);
  return out;
}

Outcome feynman_kac_check() {
  Outcome out;
  const Grid g(1, 512, 2 * pi);
  const auto m = iso(1, 1.0, 0.8);
  const auto phi = scalar(g, [](std::span<const double> x) { return std::exp(std::sin(x[0])) + 0.3 * std::cos(3 * x[0]); });
  const double t = 0.4;
  const auto exact = semigroup_apply(m, t, phi);
  MonteCarloConfig cfg;
  cfg.paths = 100000;
  cfg.steps = 1;
  cfg.seed = 11;
  double worst = 0.0;
  for (double x : {0.5, 1.7, 2.9, 4.1, 5.3}) {
    const std::vector<double> pt{x};
    const auto est = feynman_kac(phi, std::nullopt, VectorField{}, m, t, pt, cfg);
    worst = std::max(worst, std::abs(est.estimate - interpolate(exact, pt)) / est.std_error);
  }
  out.require("free_max_sigmas", worst, worst < 3.0);

  VectorField b;
  b.dim = 1;
  b.bound = 0.8;
  b.eval = [](double, std::span<const double> x, std::span<double> o) { o[0] = 0.8 * std::sin(x[0]); };
  b.modulus = [](double r) { return 0.8 * r; };
  std::vector<GridField> frames;
  for (int k = 0; k <= 10; ++k)
    frames.push_back(scalar(g, [&](std::span<const double> x) { return 0.5 * std::sin(2 * x[0]) * (1 + 0.05 * k); }));
  const SpaceTimeField f(0.05, frames);
  const double T = 0.5;
  const auto cosine = scalar(g, [](std::span<const double> x) { return std::cos(x[0]); });
  LinearProblem pb{iso(1, 1.0, 0.6), b, 0.0, f, cosine, T};
  SolverConfig sc;
  sc.time_step = 2e-3;
  const auto u = drift_solve(pb, sc);
  cfg.steps = 100;
  double worst_drift = 0.0;
  for (double x : {1.0, 2.0, 4.0}) {
    const std::vector<double> pt{x};
    const auto est = feynman_kac(cosine, f, b, pb.measure, T, pt, cfg);
    const double excess = std::abs(est.estimate - interpolate(u.back(), pt)) / std::max(3 * est.std_error, 1e-2);
    worst_drift = std::max(worst_drift, excess);
  }
  out.require("drift_err/max(3sigma,1e-2)", worst_drift, worst_drift < 1.0);
  return out;
}

double ks_one_sample(std::vector<double> s, const std::function<double(double)>& cdf) {
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double F = cdf(s[i]);
    d = std::max({d, (i + 1) / n - F, F - i / n});
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

Outcome stable_law() {
  Outcome out;
  const std::size_t n = 100000;
  double worst = 0.0;
  for (int d : {1, 2}) {
    const auto m = iso(d, 1.0, 1.0);
    std::vector<double> xi(d, 0.0);
    xi[0] = 1.0;
    const double scale = symbol(m, xi).real();  // Cauchy scale of the first marginal at dt = 1
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      CounterRng rng(3, i);
      s[i] = sample_increment(m, 1.0, rng)[0];
    }
    worst = std::max(worst, ks_one_sample(s, [scale](double x) { return 0.5 + std::atan(x / scale) / pi; }));
  }
  out.require("ks_vs_cauchy", worst, worst < 0.02);

  const auto m = iso(1, 1.0, 1.0);
  const double t = 0.3;
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    CounterRng ra(5, i), rb(6, i);
    a[i] = sample_increment(m, t, ra)[0] / t;
    b[i] = sample_increment(m, 1.0, rb)[0];
  }
  const double ss = ks_two_sample(a, b);
  out.require("ks_self_similarity", ss, ss < 0.02);
  return out;
}

Outcome krylov() {
  Outcome out;
  const double mass = 1.0, T = 1.0, side = 32.0, x0 = 16.0;
  const auto m = iso(1, 1.0, mass);
  const double scale = 0.5 * pi * mass * T;  // Cauchy scale of X_T
  const Grid g(1, 2048, side);
  MonteCarloConfig cfg;
  cfg.paths = 100000;
  cfg.steps = 100;
  cfg.seed = 17;
  double lo = 1e300, hi = 0.0;
  for (double shrink : {2.0, 1.0, 0.5, 0.25}) {
    const double r = shrink * scale;
    const auto bump = scalar(g, [&](std::span<const double> x) {
      const double z = std::abs(x[0] - x0) / r;
      return z < 1.0 ? std::pow(std::cos(0.5 * pi * z), 2) : 0.0;
    });
    const SpaceTimeField f(T, {bump, bump});
    const auto est = krylov_check(VectorField{}, m, f, 3.0, std::vector<double>{x0}, cfg);
    const double ratio = est.lhs.estimate / est.fnorm;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  out.note("ratio_min", lo);
  out.require("max/min", hi / lo, hi / lo < 3.0);
  return out;
}

GridField restrict_to(const GridField& fine, const Grid& coarse) {
  const int stride = fine.grid().points() / coarse.points();
  GridField out(coarse, fine.components());
  for (std::size_t i = 0; i < coarse.size(); ++i)
    for (int c = 0; c < fine.components(); ++c) out(c, i) = fine(c, i * stride);
  return out;
}

Outcome burgers() {
  Outcome out;
  SolverConfig cfg;
  cfg.time_step = 2e-3;
  // Constant states, d = 1 and d = 2.
  const Grid g1(1, 64, 2 * pi), g2(2, 16, 2 * pi);
  const auto c1 = GridField::constant(g1, 1, 0.7);
  GridField c2(g2, 2);
  for (std::size_t i = 0; i < g2.size(); ++i) {
    c2(0, i) = 0.3;
    c2(1, i) = -0.5;
  }
  double stationary = 0.0;
  const auto s1 = burgers_solve(c1, iso(1, 1.0), 0.5, cfg);
  const auto s2 = burgers_solve(c2, iso(2, 1.0), 0.5, cfg);
  for (const auto& fr : s1.frames()) stationary = std::max(stationary, lp_norm(fr - c1, kInfinity));
  for (const auto& fr : s2.frames()) stationary = std::max(stationary, lp_norm(fr - c2, kInfinity));
  out.require("constant_drift", stationary, stationary < 1e-10);

  auto sine = [](const Grid& g, double shift) {
    return scalar(g, [shift](std::span<const double> x) { return std::sin(x[0]) + 0.5 * std::cos(2 * x[0]) + shift; });
  };
  const Grid g(1, 256, 2 * pi);
  const auto phi = sine(g, 0.5);
  const auto u = burgers_solve(phi, iso(1, 1.0), 1.0, cfg);
  double overshoot = -1e300, drift = 0.0;
  const double mean0 = std::accumulate(phi.values().begin(), phi.values().end(), 0.0);
  for (const auto& fr : u.frames()) {
    overshoot = std::max(overshoot, lp_norm(fr, kInfinity) - lp_norm(phi, kInfinity));
    const double mean = std::accumulate(fr.values().begin(), fr.values().end(), 0.0);
    drift = std::max(drift, std::abs(mean / mean0 - 1.0));
  }
  out.require("sup_overshoot", overshoot, overshoot <= 1e-6);
  out.require("mass_rel_change", drift, drift < 1e-6);

  const Grid fine(1, 1024, 2 * pi);
  const auto uc = burgers_solve(sine(g, 0.0), iso(1, 1.0), 0.5, cfg);
  const auto uf = burgers_solve(sine(fine, 0.0), iso(1, 1.0), 0.5, cfg);
  const double conv = relative_l2_error(uc.back(), restrict_to(uf.back(), g));
  out.require("N256_vs_N1024", conv, conv < 1e-3);
  return out;
}

Outcome hamilton_jacobi() {
  Outcome out;
  const Grid g1(1, 128, 2 * pi), g2(2, 32, 2 * pi);
  const auto phi1 = scalar(g1, [](std::span<const double> x) { return 0.6 * std::cos(x[0]); });
  const auto phi2 = scalar(g2, [](std::span<const double> x) { return 0.5 * std::sin(x[0]) * std::cos(x[1]); });
  double defect = 0.0;
  HamiltonJacobiReport r1, r2;
  hamilton_jacobi_solve(make_hamiltonian("quadratic", 1), phi1, iso(1, 1.0), 0.5, {}, &r1);
  hamilton_jacobi_solve(make_hamiltonian("quadratic", 2), phi2, iso(2, 1.0), 0.5, {}, &r2);
  defect = std::max(r1.defect, r2.defect);
  out.require("gradient_defect", defect, defect < 1e-3);
  // -q solves burgers from -phi_x.
  const auto v = burgers_solve(-1.0 * partial(phi1, 0), iso(1, 1.0), 0.5);
  const double cross = lp_norm(r1.gradient->back() + v.back(), 2.0);
  out.require("burgers_cross_check", cross, cross < 1e-3);
  return out;
}

struct Entry {
  std::function<Outcome()> run;
  double budget;
};

const std::vector<std::pair<std::string, Entry>>& registry() {
  static const std::vector<std::pair<std::string, Entry>> table{
      {"symbol-isotropic", {symbol_isotropic, 1.0}},
      {"route-equivalence", {route_equivalence, 30.0}},
      {"kernel-cauchy", {kernel_cauchy, 5.0}},
      {"max-principle", {max_principle, 60.0}},
      {"maximal-regularity", {maximal_regularity, 120.0}},
      {"riesz-equivalence", {riesz_equivalence, 30.0}},
      {"analytic-semigroup", {analytic_semigroup, 30.0}},
      {"feynman-kac", {feynman_kac_check, 180.0}},
      {"stable-law", {stable_law, 30.0}},
      {"krylov", {krylov, 180.0}},
      {"burgers", {burgers, 120.0}},
      {"hamilton-jacobi", {hamilton_jacobi, 60.0}},
  };
  return table;
}

}  // namespace

std::vector<std::string> check_names() {
  std::vector<std::string> names;
  for (const auto& [name, entry] : registry()) names.push_back(name);
  return names;
}

CheckResult run_check(const std::string& name) {
  const auto& table = registry();
  const auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == name; });
  if (it == table.end()) throw InvalidArgument("unknown check '" + name + "'");
  CheckResult result;
  result.name = name;
  result.budget_seconds = it->second.budget;
  const auto start = std::chrono::steady_clock::now();
  try {
    Outcome o = it->second.run();
    result.pass = o.pass;
    result.detail = o.detail.str();
  } catch (const std::exception& e) {
    result.pass = false;
    result.detail = std::string("error: ") + e.what();
  }
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (result.seconds > result.budget_seconds) {
    result.pass = false;
    result.detail += " over_budget";
  }
  return result;
}

std::string format_result(const CheckResult& r) {
  std::ostringstream s;
  s << (r.pass ? "PASS " : "FAIL ") << r.name << " (" << std::fixed << std::setprecision(2) << r.seconds << " s / "
    << std::setprecision(0) << r.budget_seconds << " s) " << r.detail;
  return s.str();
}

}  // namespace levylab
