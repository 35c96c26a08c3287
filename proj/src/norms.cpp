#include "levylab/norms.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "levylab/errors.hpp"
#include "levylab/spectral.hpp"

namespace levylab {
namespace {

std::vector<double> magnitudes(const GridField& field) {
  const std::size_t n = field.grid().size();
  std::vector<double> mag(n, 0.0);
  if (field.components() == 1) {
    for (std::size_t i = 0; i < n; ++i) mag[i] = std::abs(field(0, i));
    return mag;
  }
  for (int c = 0; c < field.components(); ++c)
    for (std::size_t i = 0; i < n; ++i) mag[i] += field(c, i) * field(c, i);
  for (auto& m : mag) m = std::sqrt(m);
  return mag;
}

double lp_of(const std::vector<double>& mag, double cell, double p) {
  if (std::isinf(p)) return mag.empty() ? 0.0 : *std::max_element(mag.begin(), mag.end());
  // scale by the max to keep large p from overflowing
  const double peak = *std::max_element(mag.begin(), mag.end());
  if (peak == 0.0) return 0.0;
  double sum = 0.0;
  for (double m : mag) sum += std::pow(m / peak, p);
  return peak * std::pow(cell * sum, 1.0 / p);
}

// Difference magnitude |u(x) - u(y)| over all components.
double difference(const GridField& f, std::size_t i, std::size_t j) {
  if (f.components() == 1) return std::abs(f(0, i) - f(0, j));
  double s = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    const double d = f(c, i) - f(c, j);
    s += d * d;
  }
  return std::sqrt(s);
}

struct Offset {
  std::array<int, 3> step;
  double distance;
};

// Offsets with lo <= |o| h <= hi, each axis component in (-N/2, N/2].
std::vector<Offset> offsets_within(const Grid& grid, double lo, double hi) {
  const int n = grid.points();
  const double h = grid.spacing();
  const int reach = std::min(n / 2, static_cast<int>(std::floor(hi / h)) + 1);
  std::vector<Offset> out;
  std::array<int, 3> o{0, 0, 0};
  const int dim = grid.dim();
  auto visit = [&](auto&& self, int axis) -> void {
    if (axis == dim) {
      double r2 = 0.0;
      for (int a = 0; a < dim; ++a) r2 += static_cast<double>(o[a]) * o[a];
      const double r = std::sqrt(r2) * h;
      if (r >= lo * (1 - 1e-12) && r <= hi * (1 + 1e-12) && r > 0.0) out.push_back({o, r});
      return;
    }
    for (int s = -reach; s <= reach; ++s) {
      if (s <= -n / 2 || s > n / 2) continue;
      o[axis] = s;
      self(self, axis + 1);
    }
    o[axis] = 0;
  };
  visit(visit, 0);
  return out;
}

}  // namespace

double lp_norm(const GridField& field, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("L^p norm needs p >= 1");
  return lp_of(magnitudes(field), field.grid().cell_volume(), p);
}

double bessel_norm(const GridField& field, double alpha, double p) {
  if (!(alpha >= 0.0)) throw InvalidArgument("Bessel order must be nonnegative");
  if (alpha == 0.0) return lp_norm(field, p);
  auto table = multiplier_table(field.grid(), [alpha](std::span<const double> xi) {
    double r2 = 0.0;
    for (double x : xi) r2 += x * x;
    return Complex(std::pow(1.0 + r2, 0.5 * alpha), 0.0);
  });
  return lp_norm(apply_multiplier(field, table), p);
}

double slobodeckij_seminorm(const GridField& field, double beta, double p) {
  if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("Slobodeckij order must lie in (0,1)");
  if (!(p >= 1.0) || std::isinf(p)) throw InvalidArgument("Slobodeckij norm needs finite p >= 1");
  const Grid& grid = field.grid();
  const int n = grid.points();
  const int dim = grid.dim();
  const double cell = grid.cell_volume();
  const auto offs = offsets_within(grid, grid.spacing(), 0.5 * grid.side());
  double sum = 0.0;
  for (const auto& off : offs) {
    const double weight = cell * cell / std::pow(off.distance, dim + beta * p);
    double partial = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      auto idx = grid.unravel(i);
      for (int a = 0; a < dim; ++a) idx[a] = ((idx[a] + off.step[a]) % n + n) % n;
      partial += std::pow(difference(field, i, grid.ravel(idx)), p);
    }
    sum += weight * partial;
  }
  return std::pow(sum, 1.0 / p);
}

double slobodeckij_norm(const GridField& field, double beta, double p) {
  return lp_norm(field, p) + slobodeckij_seminorm(field, beta, p);
}

double holder_seminorm(const GridField& field, double beta, PairSet pairs) {
  if (!(beta > 0.0 && beta <= 1.0)) throw InvalidArgument("Hoelder exponent must lie in (0,1]");
  const Grid& grid = field.grid();
  const int n = grid.points();
  const int dim = grid.dim();
  const auto offs = offsets_within(grid, 0.0, 1.0);
  double best = 0.0;
  for (const auto& off : offs) {
    const double scale = std::pow(off.distance, beta);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      auto idx = grid.unravel(i);
      bool wrapped = false;
      for (int a = 0; a < dim; ++a) {
        const int j = idx[a] + off.step[a];
        wrapped = wrapped || j < 0 || j >= n;
        idx[a] = (j % n + n) % n;
      }
      if (wrapped && pairs == PairSet::NonWrapping) continue;
      best = std::max(best, difference(field, i, grid.ravel(idx)) / scale);
    }
  }
  return best;
}

double holder_norm(const GridField& field, double beta, PairSet pairs) {
  return lp_norm(field, kInfinity) + holder_seminorm(field, beta, pairs);
}

double inner_product(const GridField& a, const GridField& b) {
  if (!(a.grid() == b.grid()) || a.components() != b.components())
    throw InvalidArgument("inner product of incompatible fields");
  double s = 0.0;
  auto va = a.values();
  auto vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i) s += va[i] * vb[i];
  return s * a.grid().cell_volume();
}

double relative_l2_error(const GridField& a, const GridField& b) {
  const double diff = lp_norm(a - b, 2.0);
  const double ref = lp_norm(b, 2.0);
  return ref > 0.0 ? diff / ref : diff;
}

double gradient_lp_norm(const GridField& scalar, double p) { return lp_norm(gradient(scalar), p); }

}  // namespace levylab
