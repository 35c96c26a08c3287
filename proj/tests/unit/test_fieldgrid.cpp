#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "levylab/errors.hpp"
#include "levylab/field_io.hpp"
#include "levylab/grid.hpp"
#include "levylab/norms.hpp"
#include "levylab/spectral.hpp"

using namespace levylab;
using std::numbers::pi;

namespace {

// Random band-limited field: a few low modes with random amplitudes.
GridField random_smooth(const Grid& g, unsigned seed, int modes = 4) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  std::vector<std::array<double, 5>> terms;
  for (int i = 0; i < 3 * modes; ++i) {
    std::uniform_int_distribution<int> k(-modes, modes);
    terms.push_back({double(k(rng)), double(k(rng)), double(k(rng)), n01(rng), 2 * pi * std::uniform_real_distribution<>()(rng)});
  }
  return GridField::sample_scalar(g, [&](std::span<const double> x) {
    double v = 0.0;
    for (const auto& t : terms) {
      double phase = t[4];
      for (int a = 0; a < g.dim(); ++a) phase += 2 * pi * t[a] * x[a] / g.side();
      v += t[3] * std::cos(phase);
    }
    return v;
  });
}

// Naive DFT with the forward sign convention, independent of FFTW.
std::vector<std::complex<double>> naive_dft_1d(const std::vector<double>& u) {
  const std::size_t n = u.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j) out[k] += u[j] * std::polar(1.0, -2 * pi * double(k * j % n) / n);
  return out;
}

}  // namespace

TEST_CASE("grid geometry and indexing") {
  Grid g(2, 8, 4.0);
  CHECK(g.spacing() == doctest::Approx(0.5));
  CHECK(g.size() == 64);
  CHECK(g.volume() == doctest::Approx(16.0));
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(g.ravel(g.unravel(i)) == i);
  CHECK(g.signed_mode(3) == 3);
  CHECK(g.signed_mode(4) == -4);
  CHECK(g.signed_mode(7) == -1);
  CHECK(g.mirror(g.mirror(13)) == 13);
  std::array<double, 3> xi{};
  g.frequency(g.ravel({1, 7, 0}), xi);
  CHECK(xi[0] == doctest::Approx(2 * pi / 4));
  CHECK(xi[1] == doctest::Approx(-2 * pi / 4));
  CHECK_THROWS_AS(Grid(1, 12, 1.0), InvalidArgument);
  CHECK_THROWS_AS(Grid(4, 8, 1.0), InvalidArgument);
  CHECK_THROWS_AS(Grid(1, 8, -1.0), InvalidArgument);
}

TEST_CASE("field construction rejects non-finite values") {
  Grid g(1, 4, 1.0);
  CHECK_THROWS_AS(GridField(g, 1, {0.0, 1.0, NAN, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(GridField(g, 2, {0.0, 1.0}), InvalidArgument);
  GridField f(g, 2);
  CHECK(f.values().size() == 8);
}

TEST_CASE("space-time field interpolates linearly and clamps") {
  Grid g(1, 4, 1.0);
  SpaceTimeField st(0.5, {GridField::constant(g, 1, 0.0), GridField::constant(g, 1, 2.0)});
  CHECK(st.horizon() == doctest::Approx(0.5));
  CHECK(st.at_time(0.25)(0, 0) == doctest::Approx(1.0));
  CHECK(st.at_time(3.0)(0, 2) == doctest::Approx(2.0));
  CHECK_THROWS_AS(SpaceTimeField(0.5, {GridField(g, 1), GridField(Grid(1, 8, 1.0), 1)}), InvalidArgument);
}

TEST_CASE("forward then inverse reproduces fields") {
  for (int dim = 1; dim <= 3; ++dim) {
    Grid g(dim, dim == 3 ? 8 : 32, 3.0);
    auto f = random_smooth(g, 11 + dim);
    auto back = inverse_real(g, forward(g, f.values()));
    double num = 0, den = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      num += (back[i] - f(0, i)) * (back[i] - f(0, i));
      den += f(0, i) * f(0, i);
    }
    CHECK(std::sqrt(num / den) < 1e-12);
  }
}

TEST_CASE("forward transform matches a naive DFT") {
  Grid g(1, 16, 1.0);
  auto f = random_smooth(g, 3);
  auto fast = forward(g, f.values());
  auto slow = naive_dft_1d(std::vector<double>(f.values().begin(), f.values().end()));
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(std::abs(fast[k] - slow[k]) < 1e-11);
}

TEST_CASE("Parseval identity on the grid") {
  Grid g(2, 16, 2.0);
  auto f = random_smooth(g, 5);
  auto s = forward(g, f.values());
  double freq = 0.0;
  for (auto v : s) freq += std::norm(v);
  freq *= g.cell_volume() / double(g.size());
  const double space = std::pow(lp_norm(f, 2.0), 2);
  CHECK(std::abs(freq - space) <= 1e-10 * space);
}

TEST_CASE("lp norm examples") {
  Grid g(1, 64, 3.0);
  CHECK(lp_norm(GridField(g, 1), 2.0) == 0.0);
  auto c = GridField::constant(g, 1, -2.5);
  for (double p : {1.0, 2.0, 3.5}) CHECK(lp_norm(c, p) == doctest::Approx(2.5 * std::pow(3.0, 1.0 / p)).epsilon(1e-13));
  CHECK(lp_norm(c, kInfinity) == doctest::Approx(2.5));
  auto s = GridField::sample_scalar(g, [](std::span<const double> x) { return std::sin(2 * pi * x[0] / 3.0); });
  // Parseval oracle: only modes +-1 carry energy, each |u_hat|^2 = (N/2)^2.
  const double oracle = std::sqrt(g.cell_volume() / g.size() * 2 * std::pow(g.size() / 2.0, 2));
  CHECK(lp_norm(s, 2.0) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(lp_norm(s, 2.0) == doctest::Approx(std::sqrt(1.5)).epsilon(1e-12));
  CHECK_THROWS_AS(lp_norm(s, 0.5), InvalidArgument);
}

TEST_CASE("vector fields use the Euclidean magnitude") {
  Grid g(1, 8, 1.0);
  GridField v = GridField::sample(g, 2, [](std::span<const double>, std::span<double> out) {
    out[0] = 3.0;
    out[1] = 4.0;
  });
  CHECK(lp_norm(v, kInfinity) == doctest::Approx(5.0));
  CHECK(lp_norm(v, 2.0) == doctest::Approx(5.0));
}

TEST_CASE("bessel norm examples") {
  Grid g(1, 64, 2 * pi);
  auto f = random_smooth(g, 7);
  CHECK(bessel_norm(f, 0.0, 3.0) == lp_norm(f, 3.0));
  const double k = 3.0;
  auto mode = GridField::sample_scalar(g, [&](std::span<const double> x) { return std::sin(k * x[0]); });
  for (double a : {0.5, 1.0, 2.0})
    CHECK(bessel_norm(mode, a, 2.0) == doctest::Approx(std::pow(1 + k * k, a / 2) * lp_norm(mode, 2.0)).epsilon(1e-12));

  // Frequency-sum oracle with a naive DFT.
  auto hat = naive_dft_1d(std::vector<double>(f.values().begin(), f.values().end()));
  double sum = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double xi = 2 * pi * g.signed_mode(int(j)) / g.side();
    sum += (1 + xi * xi) * std::norm(hat[j]);
  }
  const double oracle = std::sqrt(g.cell_volume() / g.size() * sum);
  CHECK(bessel_norm(f, 1.0, 2.0) == doctest::Approx(oracle).epsilon(1e-11));
}

TEST_CASE("bessel norm is monotone in the order") {
  Grid g(2, 16, 5.0);
  auto f = random_smooth(g, 9);
  double prev = 0.0;
  for (double a : {0.0, 0.25, 0.5, 1.0, 1.5, 2.0}) {
    const double v = bessel_norm(f, a, 2.0);
    CHECK(v >= prev * (1 - 1e-14));
    prev = v;
  }
}

TEST_CASE("slobodeckij seminorm matches a brute-force pair loop") {
  Grid g(1, 32, 2.0);
  auto f = GridField::sample_scalar(g, [](std::span<const double> x) { return std::sin(pi * x[0]); });
  const double beta = 0.5, p = 2.0, h = g.spacing();
  double sum = 0.0;
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j) {
      int d = std::abs(i - j);
      d = std::min(d, 32 - d);
      const double r = d * h;
      if (r < h || r > 1.0 + 1e-12) continue;
      sum += h * h * std::pow(std::abs(f(0, i) - f(0, j)), p) / std::pow(r, 1 + beta * p);
    }
  CHECK(slobodeckij_seminorm(f, beta, p) == doctest::Approx(std::pow(sum, 1 / p)).epsilon(1e-10));
  CHECK(slobodeckij_norm(f, beta, p) == doctest::Approx(lp_norm(f, p) + std::pow(sum, 1 / p)).epsilon(1e-10));
}

TEST_CASE("slobodeckij brute force in two dimensions") {
  Grid g(2, 8, 1.0);
  auto f = random_smooth(g, 21, 2);
  const double beta = 0.3, p = 3.0, h = g.spacing();
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j) {
      auto a = g.unravel(i), b = g.unravel(j);
      double r2 = 0;
      for (int ax = 0; ax < 2; ++ax) {
        int d = std::abs(a[ax] - b[ax]);
        d = std::min(d, 8 - d);
        r2 += double(d * d);
      }
      const double r = std::sqrt(r2) * h;
      if (r < h * (1 - 1e-12) || r > 0.5 * (1 + 1e-12)) continue;
      sum += std::pow(h, 4) * std::pow(std::abs(f(0, i) - f(0, j)), p) / std::pow(r, 2 + beta * p);
    }
  CHECK(slobodeckij_seminorm(f, beta, p) == doctest::Approx(std::pow(sum, 1 / p)).epsilon(1e-10));
}

TEST_CASE("slobodeckij edge cases") {
  Grid g(1, 16, 1.0);
  auto c = GridField::constant(g, 1, 4.0);
  CHECK(slobodeckij_seminorm(c, 0.5, 2.0) == 0.0);
  CHECK(slobodeckij_norm(c, 0.5, 2.0) == doctest::Approx(lp_norm(c, 2.0)));
  CHECK(slobodeckij_norm(GridField(g, 1), 0.5, 2.0) == 0.0);
  CHECK_THROWS_AS(slobodeckij_norm(c, 1.0, 2.0), InvalidArgument);
  CHECK_THROWS_AS(slobodeckij_norm(c, 0.0, 2.0), InvalidArgument);
}

TEST_CASE("slobodeckij seminorm converges under refinement") {
  double prev = 0.0, prev_change = 1e300;
  for (int n : {32, 64, 128, 256}) {
    Grid g(1, n, 2 * pi);
    auto f = GridField::sample_scalar(g, [](std::span<const double> x) { return std::exp(std::cos(x[0])); });
    const double v = slobodeckij_seminorm(f, 0.4, 2.0);
    if (prev > 0.0) {
      const double change = std::abs(v - prev);
      CHECK(change < prev_change);
      prev_change = change;
    }
    prev = v;
  }
  CHECK(prev_change < 5e-2 * prev);
}

TEST_CASE("hoelder seminorm examples") {
  Grid g(1, 64, 4.0);
  CHECK(holder_seminorm(GridField::constant(g, 1, 3.0), 0.7) == 0.0);
  auto saw = GridField::sample_scalar(g, [](std::span<const double> x) { return x[0]; });
  // Brute-force pair scan on the non-wrapping pair set.
  double best = 0.0;
  for (int i = 0; i < 64; ++i)
    for (int j = i + 1; j < 64; ++j) {
      const double r = (j - i) * g.spacing();
      if (r > 1.0) continue;
      best = std::max(best, std::abs(saw(0, j) - saw(0, i)) / r);
    }
  CHECK(holder_seminorm(saw, 1.0, PairSet::NonWrapping) == doctest::Approx(best).epsilon(1e-14));
  CHECK(best == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(holder_seminorm(saw, 1.0, PairSet::Periodic) > 10.0);
  auto half = 0.5 * saw;
  CHECK(holder_seminorm(half, 0.5, PairSet::NonWrapping) ==
        doctest::Approx(0.5 * holder_seminorm(saw, 0.5, PairSet::NonWrapping)).epsilon(1e-14));
  CHECK(holder_norm(saw, 1.0, PairSet::NonWrapping) == doctest::Approx(lp_norm(saw, kInfinity) + 1.0));
}

TEST_CASE("norms are absolutely homogeneous and satisfy the triangle inequality") {
  Grid g(2, 16, 3.0);
  for (unsigned seed = 0; seed < 5; ++seed) {
    auto u = random_smooth(g, 100 + seed);
    auto v = random_smooth(g, 200 + seed);
    const double c = -1.7;
    auto cu = c * u;
    auto w = u + v;
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::abs(b); };
    CHECK(close(lp_norm(cu, 2.0), std::abs(c) * lp_norm(u, 2.0)));
    CHECK(close(lp_norm(cu, kInfinity), std::abs(c) * lp_norm(u, kInfinity)));
    CHECK(close(bessel_norm(cu, 0.7, 3.0), std::abs(c) * bessel_norm(u, 0.7, 3.0)));
    CHECK(close(slobodeckij_norm(cu, 0.5, 2.0), std::abs(c) * slobodeckij_norm(u, 0.5, 2.0)));
    CHECK(close(holder_norm(cu, 0.5), std::abs(c) * holder_norm(u, 0.5)));
    CHECK(lp_norm(w, 1.5) <= lp_norm(u, 1.5) + lp_norm(v, 1.5) + 1e-10);
    CHECK(bessel_norm(w, 1.0, 2.0) <= bessel_norm(u, 1.0, 2.0) + bessel_norm(v, 1.0, 2.0) + 1e-10);
    CHECK(slobodeckij_norm(w, 0.5, 2.0) <= slobodeckij_norm(u, 0.5, 2.0) + slobodeckij_norm(v, 0.5, 2.0) + 1e-10);
    CHECK(holder_norm(w, 0.3) <= holder_norm(u, 0.3) + holder_norm(v, 0.3) + 1e-10);
  }
}

TEST_CASE("spectral derivatives and translation") {
  Grid g(1, 64, 2 * pi);
  auto f = GridField::sample_scalar(g, [](std::span<const double> x) { return std::sin(3 * x[0]) + std::cos(x[0]); });
  auto df = partial(f, 0);
  auto shift = translate(f, std::vector<double>{0.3});
  const double theta[1] = {1.0};
  auto d3 = directional_derivative(f, theta, 3);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = i * g.spacing();
    CHECK(df(0, i) == doctest::Approx(3 * std::cos(3 * x) - std::sin(x)).epsilon(1e-11));
    CHECK(shift(0, i) == doctest::Approx(std::sin(3 * (x + 0.3)) + std::cos(x + 0.3)).epsilon(1e-11));
    CHECK(d3(0, i) == doctest::Approx(-27 * std::cos(3 * x) + std::sin(x)).epsilon(1e-10));
  }
}

TEST_CASE("mollification") {
  Grid g(1, 64, 1.0);
  auto f = random_smooth(g, 4);
  auto same = mollify(f, 0.5 * g.spacing());
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(same(0, i) == f(0, i));
  auto c = GridField::constant(g, 1, 2.0);
  auto mc = mollify(c, 0.1);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(mc(0, i) == doctest::Approx(2.0).epsilon(1e-12));
  auto smooth = mollify(f, 0.1);
  CHECK(lp_norm(smooth, 2.0) <= lp_norm(f, 2.0) * (1 + 1e-12));
}

TEST_CASE("dealiasing removes the upper third of the spectrum") {
  Grid g(1, 32, 2 * pi);
  auto f = GridField::sample_scalar(g, [](std::span<const double> x) { return std::cos(2 * x[0]) + std::cos(12 * x[0]); });
  auto d = dealiased(f);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(d(0, i) == doctest::Approx(std::cos(2 * i * g.spacing())).epsilon(1e-12));
}

TEST_CASE("binary and CSV field round trips") {
  Grid g(2, 8, 1.25);
  auto f = GridField::sample(g, 2, [](std::span<const double> x, std::span<double> out) {
    out[0] = std::sin(x[0]) / 3.0;
    out[1] = x[1] * 1e-7 + 1.0 / 7.0;
  });
  std::stringstream bin;
  write_field_binary(bin, f);
  CHECK(bin.str().size() == 4 + 4 + 8 + 4 + 2 * 64 * 8);
  auto fb = read_field_binary(bin);
  CHECK(fb.grid() == g);
  for (std::size_t i = 0; i < f.values().size(); ++i) CHECK(fb.values()[i] == f.values()[i]);

  std::stringstream csv;
  write_field_csv(csv, f);
  auto fc = read_field_csv(csv);
  CHECK(fc.grid().points() == 8);
  CHECK(fc.grid().side() == doctest::Approx(1.25).epsilon(1e-15));
  for (std::size_t i = 0; i < f.values().size(); ++i) CHECK(fc.values()[i] == f.values()[i]);

  std::stringstream bad("garbage");
  CHECK_THROWS_AS(read_field_binary(bad), IoError);
}
