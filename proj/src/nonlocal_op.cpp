#include "levylab/nonlocal_op.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "levylab/errors.hpp"
#include "levylab/norms.hpp"
#include "rules.hpp"

namespace levylab {
namespace {

constexpr double kPi = std::numbers::pi;

// One direction of the quadrature: nu restricted to the ray through theta is
// (g + a q(r)) r^(-1-alpha) dr.
struct Ray {
  std::array<double, 3> theta;
  double g;
  double a;
};

std::vector<Ray> rays_of(const LevyMeasure& m, int directions) {
  const int d = m.dim();
  std::vector<Ray> rays;
  std::vector<std::array<double, 3>> nodes;
  std::vector<double> weights;
  switch (m.kind()) {
    case MeasureKind::StableSpectral: {
      const auto& sigma = m.sigma();
      if (!sigma.is_isotropic()) {
        for (const auto& atom : sigma.atoms()) {
          Ray r{{0.0, 0.0, 0.0}, atom.weight, 0.0};
          std::copy(atom.direction.begin(), atom.direction.end(), r.theta.begin());
          rays.push_back(r);
        }
        break;
      }
      detail::sphere_rule(d, directions, nodes, weights);
      const double scale = sigma.total_mass() / sphere_area(d);
      for (std::size_t j = 0; j < nodes.size(); ++j) rays.push_back({nodes[j], scale * weights[j], 0.0});
      break;
    }
    case MeasureKind::DirectSumAxes: {
      const auto& w = m.axis_weights();
      for (int i = 0; i < d; ++i) {
        for (double sign : {1.0, -1.0}) {
          Ray r{{0.0, 0.0, 0.0}, w[i], 0.0};
          r.theta[i] = sign;
          rays.push_back(r);
        }
      }
      break;
    }
    case MeasureKind::DensityKernel: {
      const auto& a = m.density_function();
      detail::sphere_rule(d, directions, nodes, weights);
      for (std::size_t j = 0; j < nodes.size(); ++j) {
        std::span<const double> th(nodes[j].data(), d);
        rays.push_back({nodes[j], weights[j] * a.angular(th), weights[j] * a.perturbation_angle(th)});
      }
      break;
    }
  }
  return rays;
}

// Radial nodes on [r0, R]: panels doubling from r0 until they reach `cap`,
// then uniform panels no longer than cap, with a break at r = 1 where the
// alpha = 1 compensation jumps.
void radial_rule(double alpha, double r0, double R, double cap, int n, std::vector<double>& r,
                 std::vector<double>& w) {
  std::vector<double> edges{r0};
  double e = r0;
  while (e < R) {
    const double len = std::min(e, cap);
    double next = std::min(R, e + len);
    if (alpha == 1.0 && e < 1.0 && next > 1.0) next = 1.0;
    edges.push_back(next);
    e = next;
  }
  std::vector<double> x, wx;
  detail::gauss_legendre(n, x, wx);
  r.clear();
  w.clear();
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double mid = 0.5 * (edges[p] + edges[p + 1]);
    const double half = 0.5 * (edges[p + 1] - edges[p]);
    for (int k = 0; k < n; ++k) {
      r.push_back(mid + half * x[k]);
      w.push_back(half * wx[k]);
    }
  }
}

// int_R^inf c(r) r^(-alpha) dr.
double far_compensation(double alpha, double R) {
  if (alpha > 1.0) return std::pow(R, 1.0 - alpha) / (alpha - 1.0);
  if (alpha == 1.0 && R < 1.0) return -std::log(R);
  return 0.0;
}

// Gauss-Laguerre rule for int_0^inf e^(-v) f(v) dv, Newton on L_n.
struct LaguerreRule {
  std::vector<double> x, w;
  explicit LaguerreRule(int n) {
    x.resize(n);
    w.resize(n);
    double z = 0.0;
    for (int i = 0; i < n; ++i) {
      if (i == 0)
        z = 3.0 / (1.0 + 2.4 * n);
      else if (i == 1)
        z += 15.0 / (1.0 + 2.5 * n);
      else
        z += (1.0 + 2.55 * (i - 1)) / (1.9 * (i - 1)) * (z - x[i - 2]);
      double p1 = 0.0, p2 = 0.0, pp = 0.0;
      for (int it = 0; it < 200; ++it) {
        p1 = 1.0;
        p2 = 0.0;
        for (int j = 1; j <= n; ++j) {
          const double p3 = p2;
          p2 = p1;
          p1 = ((2.0 * j - 1.0 - z) * p2 - (j - 1.0) * p3) / j;
        }
        pp = n * (p1 - p2) / z;
        const double dz = p1 / pp;
        z -= dz;
        if (std::abs(dz) <= 1e-15 * std::max(1.0, z)) break;
      }
      x[i] = z;
      w[i] = -1.0 / (pp * n * p2);
    }
  }
};

const LaguerreRule& laguerre() {
  static const LaguerreRule rule(48);
  return rule;
}

// E(sigma) for sigma >= 4 by rotating the contour to r = 1 + i t.
Complex tail_integral_rotated(double alpha, double sigma) {
  const auto& rule = laguerre();
  Complex sum = 0.0;
  for (std::size_t j = 0; j < rule.x.size(); ++j)
    sum += rule.w[j] * std::pow(Complex(1.0, rule.x[j] / sigma), -1.0 - alpha);
  return Complex(0.0, 1.0) * std::polar(1.0 / sigma, sigma) * sum;
}

// int_1^inf e^(iv) v^(-1-alpha) dv: Gauss-Legendre on [1, 4], then the
// rotated contour from 4.
Complex tail_integral_at_one(double alpha) {
  std::vector<double> x, w;
  detail::gauss_legendre(40, x, w);
  Complex sum = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double v = 2.5 + 1.5 * x[k];
    sum += 1.5 * w[k] * std::polar(std::pow(v, -1.0 - alpha), v);
  }
  return sum + std::pow(4.0, -alpha) * tail_integral_rotated(alpha, 4.0);
}

// Memoized multiplier tables.
struct CachedTable {
  Spectrum table;
  QuadratureReport report;
};

std::mutex cache_mutex;
std::map<std::string, std::shared_ptr<const CachedTable>> cache;

template <class Build>
std::shared_ptr<const CachedTable> memoized(const std::string& key, Build build) {
  {
    std::lock_guard lock(cache_mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto value = std::make_shared<const CachedTable>(build());
  std::lock_guard lock(cache_mutex);
  if (cache.size() > 256) cache.clear();
  return cache.emplace(key, value).first->second;
}

std::string table_key(const char* tag, const LevyMeasure& m, const Grid& grid, const OperatorRoute& route) {
  std::ostringstream os;
  os << tag << '|' << m.digest() << '|' << grid.dim() << ',' << grid.points() << ',' << std::hexfloat
     << grid.side() << '|' << route.radial_nodes << ',' << route.truncation_radius << ',' << route.directions << ','
     << route.inner_fraction << ',' << route.far_field;
  return os.str();
}

int default_directions(int dim, int requested) {
  if (requested > 0) return requested;
  return dim == 3 ? 16 : 128;
}

struct Geometry {
  double r0;  // inner Taylor radius
  double R;   // truncation radius
  double near_end;
};

Geometry geometry(const LevyMeasure& m, const Grid& grid, const OperatorRoute& route) {
  const double h = grid.spacing();
  if (!(route.inner_fraction > 0.0)) throw InvalidArgument("inner radius fraction must be positive");
  if (route.radial_nodes < 2) throw InvalidArgument("need at least two radial nodes per panel");
  Geometry g;
  g.r0 = std::min(route.inner_fraction * h, 0.5);
  g.R = route.truncation_radius > 0.0 ? route.truncation_radius : 0.5 * grid.side();
  if (g.R < h) throw InvalidArgument("truncation radius below the grid spacing");
  g.R = std::max(g.R, 2.0 * g.r0);
  g.near_end = g.R;
  // The decaying part of a density stays in the near field entirely.
  if (m.kind() == MeasureKind::DensityKernel && m.density_function().has_perturbation())
    g.near_end = std::max(g.R, m.density_function().perturbation_extent());
  return g;
}

double ray_density(const LevyMeasure& m, const Ray& ray, double r) {
  double v = ray.g;
  if (ray.a != 0.0) v += ray.a * m.density_function().perturbation_radius(r);
  return v * std::pow(r, -1.0 - m.alpha());
}

// Per-axis phases exp(i xi_j y) for the N modes of one axis.
void axis_phases(const Grid& grid, double y, std::vector<Complex>& out) {
  const int n = grid.points();
  out.resize(n);
  const double base = 2.0 * kPi / grid.side();
  for (int j = 0; j < n; ++j) out[j] = std::polar(1.0, base * grid.signed_mode(j) * y);
}

// table[k] += weight * exp(i xi_k . y)
void add_plane_wave(const Grid& grid, std::span<const double> y, double weight, Spectrum& table,
                    std::array<std::vector<Complex>, 3>& ph) {
  const int d = grid.dim();
  const int n = grid.points();
  for (int a = 0; a < d; ++a) axis_phases(grid, y[a], ph[a]);
  if (d == 1) {
    for (int i = 0; i < n; ++i) table[i] += weight * ph[0][i];
  } else if (d == 2) {
    for (int i = 0; i < n; ++i) {
      const Complex c = weight * ph[0][i];
      Complex* row = table.data() + static_cast<std::size_t>(i) * n;
      for (int j = 0; j < n; ++j) row[j] += c * ph[1][j];
    }
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Complex c = weight * ph[0][i] * ph[1][j];
        Complex* row = table.data() + (static_cast<std::size_t>(i) * n + j) * n;
        for (int k = 0; k < n; ++k) row[k] += c * ph[2][k];
      }
  }
}

double dot_theta(std::span<const double> xi, const std::array<double, 3>& theta) {
  double s = 0.0;
  for (std::size_t a = 0; a < xi.size(); ++a) s += xi[a] * theta[a];
  return s;
}

// Far-field multiplier of one unit-weight line at s = xi.theta:
// int_R^inf (e^(isr) - 1 - i s r c(r)) r^(-1-alpha) dr.
Complex far_line(double alpha, double R, double comp, double s) {
  const double scale = std::pow(R, -alpha);
  return scale * (tail_exponential_integral(alpha, s * R) - 1.0 / alpha) - Complex(0.0, s * comp);
}

// Mean over the unit sphere of the far-field line multiplier at |xi| = rho.
double far_isotropic_mean(int dim, double alpha, double R, double rho) {
  if (rho == 0.0) return 0.0;
  thread_local boost::math::quadrature::tanh_sinh<double> ts;
  const double comp = 0.0;  // odd in theta, averages out
  if (dim == 1) return far_line(alpha, R, comp, rho).real();
  if (dim == 2) {
    auto f = [&](double phi) { return far_line(alpha, R, comp, rho * std::cos(phi)).real(); };
    return 2.0 / kPi * ts.integrate(f, 0.0, 0.5 * kPi, 1e-11);
  }
  auto f = [&](double u) { return far_line(alpha, R, comp, rho * u).real(); };
  return ts.integrate(f, 0.0, 1.0, 1e-11);
}

Spectrum far_table(const LevyMeasure& m, const Grid& grid, double R, const std::vector<Ray>& rays) {
  const int d = m.dim();
  const double alpha = m.alpha();
  const double comp = far_compensation(alpha, R);
  Spectrum table(grid.size(), 0.0);
  std::vector<double> xi(d);

  bool isotropic = false;
  double mass = 0.0;
  if (d > 1 && m.kind() == MeasureKind::StableSpectral && m.sigma().is_isotropic()) {
    isotropic = true;
    mass = m.sigma().total_mass();
  }
  if (d > 1 && m.kind() == MeasureKind::DensityKernel && m.density_function().spec().family != "angular") {
    isotropic = true;
    const std::array<double, 3> e1{1.0, 0.0, 0.0};
    mass = m.density_function().angular(std::span<const double>(e1.data(), d)) * sphere_area(d);
  }

  if (isotropic) {
    std::map<double, double> by_radius;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      grid.frequency(k, xi);
      double rho2 = 0.0;
      for (double v : xi) rho2 += v * v;
      auto it = by_radius.find(rho2);
      if (it == by_radius.end())
        it = by_radius.emplace(rho2, mass * far_isotropic_mean(d, alpha, R, std::sqrt(rho2))).first;
      table[k] = it->second;
    }
    return table;
  }

  if (m.kind() == MeasureKind::DensityKernel && d == 2) {
    // Angular density on the circle: integrate g(phi) against the line
    // multiplier over two half circles split where xi.theta = 0.
    thread_local boost::math::quadrature::tanh_sinh<double> ts;
    const auto& a = m.density_function();
    for (std::size_t k = 0; k < grid.size(); ++k) {
      grid.frequency(k, xi);
      const double rho = std::hypot(xi[0], xi[1]);
      if (rho == 0.0) continue;
      const double phi0 = std::atan2(xi[1], xi[0]);
      auto weight = [&](double phi) {
        const double th[2] = {std::cos(phi), std::sin(phi)};
        return a.angular(th);
      };
      Complex sum = 0.0;
      for (double start : {phi0 - 0.5 * kPi, phi0 + 0.5 * kPi}) {
        auto re = [&](double phi) { return weight(phi) * far_line(alpha, R, comp, rho * std::cos(phi - phi0)).real(); };
        auto im = [&](double phi) { return weight(phi) * far_line(alpha, R, comp, rho * std::cos(phi - phi0)).imag(); };
        sum += Complex(ts.integrate(re, start, start + kPi, 1e-11), ts.integrate(im, start, start + kPi, 1e-11));
      }
      table[k] = sum;
    }
    return table;
  }

  // Finitely many lines: atoms, coordinate axes, or the two rays of d = 1.
  for (std::size_t k = 0; k < grid.size(); ++k) {
    grid.frequency(k, xi);
    Complex sum = 0.0;
    for (const auto& ray : rays) {
      if (ray.g == 0.0) continue;
      sum += ray.g * far_line(alpha, R, comp, dot_theta(xi, ray.theta));
    }
    table[k] = sum;
  }
  return table;
}

// Inner region r < r0 along one ray, expanded in powers of r:
// f(x + r theta) - f(x) = sum_k r^k / k! D^k f. The moments are
//   G_n = int_0^r0 r^(n-1-alpha) dr,  Q_n = int_0^r0 q(r) r^(n-1-alpha) dr
// for n = 1..order, and the series is cut where (r0 |xi|_max)^n / n! is
// below double precision.
struct InnerMoments {
  int order;
  std::vector<double> G, Q;  // index n, entry 0 unused
};

InnerMoments inner_moments(const LevyMeasure& m, const Grid& grid, double r0, int min_order) {
  const double alpha = m.alpha();
  const double x = r0 * kPi * std::sqrt(static_cast<double>(grid.dim())) / grid.spacing();
  int order = min_order;
  double term = 1.0;
  for (int n = 1; n <= 80; ++n) {
    term *= x / n;
    if (n >= min_order && term < 1e-18) {
      order = n;
      break;
    }
    order = n;
  }
  InnerMoments im{order, std::vector<double>(order + 1, 0.0), std::vector<double>(order + 1, 0.0)};
  const bool pert = m.kind() == MeasureKind::DensityKernel && m.density_function().has_perturbation();
  thread_local boost::math::quadrature::tanh_sinh<double> ts;
  for (int n = 1; n <= order; ++n) {
    const double e = n - alpha;
    im.G[n] = std::pow(r0, e) / e;
    if (pert && e > 0.0) {
      const auto& a = m.density_function();
      im.Q[n] = ts.integrate([&](double r) { return r <= 0.0 ? 0.0 : a.perturbation_radius(r) * std::pow(r, e - 1.0); },
                             0.0, r0, 1e-14);
    }
  }
  return im;
}

CachedTable build_quadrature_table(const LevyMeasure& m, const Grid& grid, const OperatorRoute& route) {
  const int d = m.dim();
  const double alpha = m.alpha();
  const Geometry geo = geometry(m, grid, route);
  const auto rays = rays_of(m, default_directions(d, route.directions));
  std::vector<double> r, wr;
  radial_rule(alpha, geo.r0, geo.near_end, 2.0 * grid.spacing(), route.radial_nodes, r, wr);

  Spectrum table(grid.size(), 0.0);
  std::array<std::vector<Complex>, 3> ph;
  double total = 0.0;
  std::array<double, 3> drift{0.0, 0.0, 0.0};
  std::array<double, 3> y{0.0, 0.0, 0.0};
  std::size_t nodes = 0;
  for (const auto& ray : rays) {
    for (std::size_t k = 0; k < r.size(); ++k) {
      // Beyond R only the decaying density part remains in the near field.
      Ray part = ray;
      if (r[k] > geo.R) part.g = 0.0;
      const double w = wr[k] * ray_density(m, part, r[k]);
      if (w == 0.0) continue;
      for (int a = 0; a < d; ++a) y[a] = r[k] * ray.theta[a];
      add_plane_wave(grid, std::span<const double>(y.data(), d), w, table, ph);
      total += w;
      const double c = detail::compensation(alpha, r[k]);
      for (int a = 0; a < d; ++a) drift[a] += w * c * y[a];
      ++nodes;
    }
  }

  // Inner region: the Taylor series of f along each ray, to all orders that
  // matter on this grid. The compensation removes the first-order term for
  // alpha >= 1 (r0 < 1).
  const InnerMoments im = inner_moments(m, grid, geo.r0, 2);
  const int first = alpha < 1.0 ? 1 : 2;
  std::vector<double> xi(d);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    grid.frequency(k, xi);
    Complex inner = 0.0;
    for (const auto& ray : rays) {
      const Complex z(0.0, dot_theta(xi, ray.theta));
      Complex zn = 1.0;
      for (int n = 1; n <= im.order; ++n) {
        zn *= z / static_cast<double>(n);
        if (n >= first) inner += (ray.g * im.G[n] + ray.a * im.Q[n]) * zn;
      }
    }
    double xd = 0.0;
    for (int a = 0; a < d; ++a) xd += xi[a] * drift[a];
    table[k] += inner - total - Complex(0.0, xd);
  }

  if (route.far_field) {
    const auto far = far_table(m, grid, geo.R, rays);
    for (std::size_t k = 0; k < grid.size(); ++k) table[k] += far[k];
  }
  table[0] = 0.0;
  make_real_preserving(grid, table);
  return {std::move(table), {nodes, geo.R, 0.0}};
}

double sup_norm(const GridField& f) { return lp_norm(f, kInfinity); }

}  // namespace

OperatorRoute OperatorRoute::quadrature(int radial_nodes, double truncation_radius) {
  OperatorRoute r;
  r.variant = Variant::Quadrature;
  r.radial_nodes = radial_nodes;
  r.truncation_radius = truncation_radius;
  return r;
}

OperatorRoute commutator_route() {
  OperatorRoute r = OperatorRoute::quadrature(20);
  r.inner_fraction = 0.125;
  return r;
}

Complex tail_exponential_integral(double alpha, double sigma) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw InvalidArgument("alpha must lie in (0,2)");
  if (sigma < 0.0) return std::conj(tail_exponential_integral(alpha, -sigma));
  if (sigma == 0.0) return 1.0 / alpha;
  if (sigma >= 4.0) return tail_integral_rotated(alpha, sigma);
  // sigma^alpha [E(1) + int_sigma^1 e^(iv) v^(-1-alpha) dv], the second term
  // as a power series in v.
  thread_local double cached_alpha = -1.0;
  thread_local Complex at_one = 0.0;
  if (alpha != cached_alpha) {
    at_one = tail_integral_at_one(alpha);
    cached_alpha = alpha;
  }
  const double log_sigma = std::log(sigma);
  Complex series = 0.0;
  Complex ik = 1.0;  // i^k / k!
  for (int k = 0; k < 60; ++k) {
    const double e = k - alpha;
    const double integral = e == 0.0 ? -log_sigma : -std::expm1(e * log_sigma) / e;
    const Complex term = ik * integral;
    series += term;
    if (k > 4 && std::abs(term) < 1e-18 * std::abs(series)) break;
    ik *= Complex(0.0, 1.0 / (k + 1));
  }
  return std::pow(sigma, alpha) * (at_one + series);
}

Spectrum symbol_table(const LevyMeasure& measure, const Grid& grid) {
  if (measure.dim() != grid.dim()) throw InvalidArgument("measure and grid dimensions differ");
  const auto cached = memoized(table_key("symbol", measure, grid, {}), [&] {
    Spectrum t = multiplier_table(grid, [&](std::span<const double> xi) { return symbol(measure, xi); });
    make_real_preserving(grid, t);
    return CachedTable{std::move(t), {}};
  });
  return cached->table;
}

Spectrum operator_table(const LevyMeasure& measure, const Grid& grid, const OperatorRoute& route,
                        QuadratureReport* report) {
  if (measure.dim() != grid.dim()) throw InvalidArgument("measure and grid dimensions differ");
  if (route.variant == OperatorRoute::Variant::Multiplier) {
    Spectrum t = symbol_table(measure, grid);
    for (auto& v : t) v = -v;
    if (report) *report = {};
    return t;
  }
  const auto cached =
      memoized(table_key("quadrature", measure, grid, route), [&] { return build_quadrature_table(measure, grid, route); });
  if (report) *report = cached->report;
  return cached->table;
}

GridField apply(const LevyMeasure& measure, const GridField& field, const OperatorRoute& route,
                QuadratureReport* report) {
  QuadratureReport rep;
  const auto table = operator_table(measure, field.grid(), route, &rep);
  GridField out = apply_multiplier(field, table, 1e-8);
  if (route.variant == OperatorRoute::Variant::Quadrature && !route.far_field) {
    // |int_{|y|>R} (f(x+y) - f(x)) nu| <= 2 |f|_inf nu(B_R^c), plus the
    // compensation drift of the dropped lines.
    double bound = 2.0 * sup_norm(field) * tail_mass(measure, rep.truncation_radius);
    const double comp = far_compensation(measure.alpha(), rep.truncation_radius);
    if (comp > 0.0 && field.components() == 1) {
      const auto rays = rays_of(measure, default_directions(measure.dim(), route.directions));
      std::array<double, 3> moment{0.0, 0.0, 0.0};
      for (const auto& ray : rays)
        for (int a = 0; a < measure.dim(); ++a) moment[a] += ray.g * ray.theta[a];
      const double mnorm = std::sqrt(moment[0] * moment[0] + moment[1] * moment[1] + moment[2] * moment[2]);
      bound += comp * mnorm * sup_norm(gradient(field));
    }
    rep.dropped_tail_bound = bound;
  }
  if (report) *report = rep;
  return out;
}

GridField adjoint_apply(const LevyMeasure& measure, const GridField& field, const OperatorRoute& route) {
  if (measure.is_symmetric()) return apply(measure, field, route);
  return apply(measure.reflected(), field, route);
}

GridField commutator_composed(const LevyMeasure& measure, const GridField& f, const GridField& zeta) {
  if (f.components() != 1 || zeta.components() != 1) throw InvalidArgument("commutator needs scalar fields");
  GridField out = apply(measure, pointwise_product(f, zeta));
  out -= pointwise_product(apply(measure, f), zeta);
  out -= pointwise_product(f, apply(measure, zeta));
  return out;
}

GridField commutator_direct(const LevyMeasure& measure, const GridField& f, const GridField& zeta,
                            const OperatorRoute& route) {
  if (f.components() != 1 || zeta.components() != 1) throw InvalidArgument("commutator needs scalar fields");
  const Grid& grid = f.grid();
  if (!(grid == zeta.grid())) throw InvalidArgument("commutator fields live on different grids");
  if (measure.dim() != grid.dim()) throw InvalidArgument("measure and grid dimensions differ");
  const int d = grid.dim();
  const double alpha = measure.alpha();
  const Geometry geo = geometry(measure, grid, route);
  const auto rays = rays_of(measure, default_directions(d, route.directions));
  std::vector<double> r, wr;
  radial_rule(alpha, geo.r0, geo.near_end, 2.0 * grid.spacing(), route.radial_nodes, r, wr);

  GridField out(grid, 1);
  auto ov = out.values();
  const auto fv = f.values();
  const auto zv = zeta.values();
  const Spectrum fh = forward(grid, fv);
  const Spectrum zh = forward(grid, zv);
  std::array<std::vector<Complex>, 3> ph;
  std::array<double, 3> y{0.0, 0.0, 0.0};
  Spectrum phase(grid.size());
  for (const auto& ray : rays) {
    for (std::size_t k = 0; k < r.size(); ++k) {
      Ray part = ray;
      if (r[k] > geo.R) part.g = 0.0;
      const double w = wr[k] * ray_density(measure, part, r[k]);
      if (w == 0.0) continue;
      for (int a = 0; a < d; ++a) y[a] = r[k] * ray.theta[a];
      std::fill(phase.begin(), phase.end(), Complex(0.0));
      add_plane_wave(grid, std::span<const double>(y.data(), d), 1.0, phase, ph);
      Spectrum sf(grid.size()), sz(grid.size());
      for (std::size_t m = 0; m < grid.size(); ++m) {
        sf[m] = phase[m] * fh[m];
        sz[m] = phase[m] * zh[m];
      }
      const auto tf = inverse_real(grid, std::move(sf));
      const auto tz = inverse_real(grid, std::move(sz));
      for (std::size_t m = 0; m < grid.size(); ++m) ov[m] += w * (tf[m] - fv[m]) * (tz[m] - zv[m]);
    }
  }

  // Inner region: with A_j = D^j f / j! and B_k = D^k zeta / k! along the ray,
  // [f(x+r theta) - f][zeta(x+r theta) - zeta] = sum r^(j+k) A_j B_k.
  const InnerMoments im = inner_moments(measure, grid, geo.r0, 2);
  const int order = im.order;
  const InnerMoments im2 = inner_moments(measure, grid, geo.r0, 2 * order);
  std::vector<std::vector<double>> A(order + 1), B(order + 1);
  std::vector<double> xi(d);
  for (const auto& ray : rays) {
    if (ray.g == 0.0 && ray.a == 0.0) continue;
    for (int j = 1; j <= order; ++j) {
      Spectrum sf(grid.size()), sz(grid.size());
      double fact = 1.0;
      for (int t = 2; t <= j; ++t) fact *= t;
      for (std::size_t m = 0; m < grid.size(); ++m) {
        grid.frequency(m, xi);
        const Complex z = std::pow(Complex(0.0, dot_theta(xi, ray.theta)), j) / fact;
        sf[m] = z * fh[m];
        sz[m] = z * zh[m];
      }
      A[j] = inverse_real(grid, std::move(sf));
      B[j] = inverse_real(grid, std::move(sz));
    }
    for (int j = 1; j <= order; ++j) {
      for (int k = 1; k <= order; ++k) {
        const double c = ray.g * im2.G[j + k] + ray.a * im2.Q[j + k];
        const auto& aj = A[j];
        const auto& bk = B[k];
        for (std::size_t m = 0; m < grid.size(); ++m) ov[m] += c * aj[m] * bk[m];
      }
    }
  }

  if (route.far_field) {
    // The far part is a multiplier G; its contribution to the defect is
    // G(f zeta) - f G(zeta) - zeta G(f).
    Spectrum far = far_table(measure, grid, geo.R, rays);
    far[0] = 0.0;
    make_real_preserving(grid, far);
    out += apply_multiplier(pointwise_product(f, zeta), far);
    out -= pointwise_product(f, apply_multiplier(zeta, far));
    out -= pointwise_product(zeta, apply_multiplier(f, far));
  }
  return out;
}

GridField commutator_defect(const LevyMeasure& measure, const GridField& f, const GridField& zeta, double* discrepancy) {
  const GridField composed = commutator_composed(measure, f, zeta);
  const GridField direct = commutator_direct(measure, f, zeta, commutator_route());
  const double parts = lp_norm(apply(measure, pointwise_product(f, zeta)), 2.0) +
                       lp_norm(pointwise_product(apply(measure, f), zeta), 2.0) +
                       lp_norm(pointwise_product(f, apply(measure, zeta)), 2.0);
  const double denom = std::max(lp_norm(composed, 2.0), 1e-3 * parts);
  const double diff = lp_norm(direct - composed, 2.0);
  const double rel = denom > 0.0 ? diff / denom : diff;
  if (discrepancy) *discrepancy = rel;
  if (rel > 1e-6) throw ConsistencyFailure("commutator routes disagree", rel);
  return composed;
}

}  // namespace levylab
