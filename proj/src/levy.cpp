#include "levylab/levy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "levylab/errors.hpp"
#include "rules.hpp"

namespace levylab {
namespace {

constexpr double kPi = std::numbers::pi;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw InvalidArgument("alpha must lie in (0,2)");
}

using detail::compensation;
using detail::sphere_rule;

// Gamma(-alpha) sin(pi alpha / 2) through Gamma(2 - alpha) to stay away from
// the pole of Gamma at -1.
double odd_constant(double alpha) {
  return std::tgamma(2.0 - alpha) / (alpha * (alpha - 1.0)) * std::sin(0.5 * kPi * alpha);
}

// Integrands are written as bounded ratios times powers of r so that the
// endpoint r -> 0 never forms 0 * inf.
// (x - sin x) / x^3
double x_minus_sin_ratio(double x) {
  const double x2 = x * x;
  if (std::abs(x) < 1e-2) return (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0)) / 6.0;
  return (x - std::sin(x)) / (x2 * x);
}

// sin(x) / x
double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 : std::sin(x) / x; }

// Q(s) = int_0^inf (1 + i s r c(r) - e^(i s r)) q(r) r^(-1-alpha) dr for a
// smooth rapidly decaying profile q supported (numerically) in [0, extent].
template <class Profile>
Complex profile_symbol(double alpha, double s, double extent, const Profile& q) {
  if (s == 0.0) return 0.0;
  if (s < 0.0) return std::conj(profile_symbol(alpha, -s, extent, q));
  auto re = [&](double r) {
    if (r <= 0.0) return 0.0;
    // (1 - cos(sr)) r^(-1-alpha) = (s^2 / 2) sinc(sr/2)^2 r^(1-alpha)
    const double h = sinc(0.5 * s * r);
    return 0.5 * s * s * h * h * std::pow(r, 1.0 - alpha) * q(r);
  };
  auto im = [&](double r) {
    if (r <= 0.0) return 0.0;
    const double x = s * r;
    // s r c(r) - sin(s r) is x - sin x where compensated, -sin x elsewhere
    const double c = compensation(alpha, r);
    const double v = c > 0.0 ? s * s * s * x_minus_sin_ratio(x) * std::pow(r, 2.0 - alpha)
                             : -s * sinc(x) * std::pow(r, -alpha);
    return v * q(r);
  };
  std::vector<double> breaks{0.0};
  const double panel = kPi / s;
  for (double r = std::min(panel, extent); r < extent; r += panel) breaks.push_back(r);
  breaks.push_back(extent);
  if (alpha == 1.0 && extent > 1.0) breaks.push_back(1.0);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  thread_local boost::math::quadrature::tanh_sinh<double> ts;
  double re_sum = 0.0, im_sum = 0.0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double a = breaks[k], b = breaks[k + 1];
    if (k == 0) {
      double err_re = 0.0, err_im = 0.0, l1_re = 0.0, l1_im = 0.0;
      re_sum += ts.integrate(re, a, b, 1e-12, &err_re, &l1_re);
      im_sum += ts.integrate(im, a, b, 1e-12, &err_im, &l1_im);
      const double err = std::max(err_re / std::max(l1_re, 1e-300), err_im / std::max(l1_im, 1e-300));
      if (err > 1e-8) throw QuadratureFailure("radial quadrature did not converge near the origin", err);
    } else {
      re_sum += boost::math::quadrature::gauss<double, 30>::integrate(re, a, b);
      im_sum += boost::math::quadrature::gauss<double, 30>::integrate(im, a, b);
    }
  }
  return {re_sum, im_sum};
}

// psi of the angular part of a density: int_S g(theta) psi_1(xi.theta) dS.
Complex angular_density_symbol(const DensityFunction& a, double alpha, std::span<const double> xi) {
  const int dim = a.dim();
  if (dim == 1) {
    const double plus[1] = {1.0}, minus[1] = {-1.0};
    return a.angular(plus) * half_line_symbol(alpha, xi[0]) + a.angular(minus) * half_line_symbol(alpha, -xi[0]);
  }
  // d = 2, frame aligned with xi; the two arcs meet where xi.theta = 0.
  const double r = norm(xi);
  const double e0 = xi[0] / r, e1 = xi[1] / r;
  auto point = [&](double beta, std::array<double, 2>& th) {
    th[0] = std::cos(beta) * e0 - std::sin(beta) * e1;
    th[1] = std::cos(beta) * e1 + std::sin(beta) * e0;
  };
  auto re = [&](double beta) {
    std::array<double, 2> th{};
    point(beta, th);
    return a.angular(th) * half_line_symbol(alpha, r * std::cos(beta)).real();
  };
  auto im = [&](double beta) {
    std::array<double, 2> th{};
    point(beta, th);
    return a.angular(th) * half_line_symbol(alpha, r * std::cos(beta)).imag();
  };
  thread_local boost::math::quadrature::tanh_sinh<double> ts;
  double out_re = 0.0, out_im = 0.0;
  for (double lo : {-0.5 * kPi, 0.5 * kPi}) {
    double err = 0.0, l1 = 0.0;
    out_re += ts.integrate(re, lo, lo + kPi, 1e-12, &err, &l1);
    if (err > 1e-8 * std::max(l1, 1e-300)) throw QuadratureFailure("angular quadrature did not converge", err / l1);
    out_im += ts.integrate(im, lo, lo + kPi, 1e-12, &err, &l1);
    if (err > 1e-8 * std::max(l1, 1e-300)) throw QuadratureFailure("angular quadrature did not converge", err / l1);
  }
  return {out_re, out_im};
}

// Fixed-size sphere rule: trapezoid on the circle, Gauss-Legendre x uniform on S^2.
Complex perturbation_symbol(const DensityFunction& a, double alpha, std::span<const double> xi) {
  const int dim = a.dim();
  const double extent = a.perturbation_extent();
  auto q = [&](double r) { return a.perturbation_radius(r); };
  auto evaluate = [&](int n) {
    std::vector<std::array<double, 3>> nodes;
    std::vector<double> weights;
    sphere_rule(dim, n, nodes, weights);
    Complex sum = 0.0;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      std::span<const double> th(nodes[j].data(), dim);
      const double amp = a.perturbation_angle(th);
      if (amp == 0.0) continue;
      sum += weights[j] * amp * profile_symbol(alpha, dot(xi, th), extent, q);
    }
    return sum;
  };
  if (dim == 1) return evaluate(2);
  int n = 16;
  Complex prev = evaluate(n);
  for (; n <= 1024; n *= 2) {
    const Complex next = evaluate(2 * n);
    const double change = std::abs(next - prev);
    if (change <= 1e-10 * std::max(1.0, std::abs(next))) return next;
    prev = next;
  }
  throw QuadratureFailure("spherical quadrature did not converge", std::abs(prev));
}

}  // namespace

// ---------------------------------------------------------------------------

SphericalMeasure SphericalMeasure::isotropic(int dim, double total_mass) {
  if (dim < 1 || dim > 3) throw InvalidArgument("dimension must be 1, 2 or 3");
  if (!(total_mass > 0.0) || !std::isfinite(total_mass)) throw InvalidArgument("total mass must be positive and finite");
  SphericalMeasure m;
  m.dim_ = dim;
  m.isotropic_ = true;
  m.total_mass_ = total_mass;
  return m;
}

SphericalMeasure SphericalMeasure::discrete(std::vector<Atom> atoms) {
  if (atoms.empty()) throw InvalidArgument("discrete spherical measure needs at least one atom");
  const std::size_t dim = atoms.front().direction.size();
  if (dim < 1 || dim > 3) throw InvalidArgument("dimension must be 1, 2 or 3");
  SphericalMeasure m;
  m.dim_ = static_cast<int>(dim);
  for (const auto& a : atoms) {
    if (a.direction.size() != dim) throw InvalidArgument("atoms have inconsistent dimensions");
    if (std::abs(norm(a.direction) - 1.0) > 1e-12) throw InvalidArgument("atom direction is not a unit vector");
    if (!(a.weight > 0.0) || !std::isfinite(a.weight)) throw InvalidArgument("atom weights must be positive and finite");
    m.total_mass_ += a.weight;
  }
  m.atoms_ = std::move(atoms);
  return m;
}

SphericalMeasure SphericalMeasure::symmetric_pair(std::vector<double> direction, double total_weight) {
  std::vector<double> neg(direction);
  for (double& v : neg) v = -v;
  return discrete({{std::move(direction), 0.5 * total_weight}, {std::move(neg), 0.5 * total_weight}});
}

bool SphericalMeasure::is_symmetric() const {
  if (isotropic_) return true;
  std::vector<bool> used(atoms_.size(), false);
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (used[i]) continue;
    bool found = false;
    for (std::size_t j = 0; j < atoms_.size() && !found; ++j) {
      if (used[j] || j == i) continue;
      double dev = 0.0;
      for (int a = 0; a < dim_; ++a) dev = std::max(dev, std::abs(atoms_[i].direction[a] + atoms_[j].direction[a]));
      if (dev <= 1e-12 && std::abs(atoms_[i].weight - atoms_[j].weight) <= 1e-12 * atoms_[i].weight) {
        used[i] = used[j] = true;
        found = true;
      }
    }
    if (!found) return false;
  }
  return true;
}

std::vector<double> SphericalMeasure::first_moment() const {
  std::vector<double> m(dim_, 0.0);
  for (const auto& a : atoms_)
    for (int i = 0; i < dim_; ++i) m[i] += a.weight * a.direction[i];
  return m;
}

SphericalMeasure SphericalMeasure::reflected() const {
  if (isotropic_) return *this;
  SphericalMeasure m = *this;
  for (auto& a : m.atoms_)
    for (double& v : a.direction) v = -v;
  return m;
}

double SphericalMeasure::alpha_moment(std::span<const double> theta0, double alpha) const {
  if (static_cast<int>(theta0.size()) != dim_) throw InvalidArgument("direction has the wrong dimension");
  if (isotropic_) return total_mass_ * isotropic_moment(dim_, alpha) * std::pow(norm(theta0), alpha);
  double s = 0.0;
  for (const auto& a : atoms_) s += a.weight * std::pow(std::abs(dot(theta0, a.direction)), alpha);
  return s;
}

// ---------------------------------------------------------------------------

DensityFunction::DensityFunction(int dim, DensitySpec spec) : dim_(dim), spec_(std::move(spec)) {
  if (dim < 1 || dim > 3) throw InvalidArgument("dimension must be 1, 2 or 3");
  const auto& f = spec_.family;
  const auto& p = spec_.params;
  for (double v : p)
    if (!std::isfinite(v)) throw InvalidArgument("density parameters must be finite");
  auto need = [&](std::size_t n) {
    if (p.size() != n) throw InvalidArgument("density family '" + f + "' takes " + std::to_string(n) + " parameters");
  };
  if (f == "constant") {
    need(1);
    c1_ = c2_ = p[0];
  } else if (f == "angular") {
    need(3);
    if (dim > 2) throw InvalidArgument("angular density family is available in d <= 2");
    if (p[2] < 0.0 || p[2] != std::floor(p[2])) throw InvalidArgument("angular frequency must be a nonnegative integer");
    const double spread = std::abs(p[1]);
    c1_ = p[0] - spread;
    c2_ = p[0] + spread;
    if (dim == 1) {
      const double sign = std::fmod(p[2], 2.0) == 0.0 ? 1.0 : -1.0;
      c1_ = std::min(p[0] + p[1], p[0] + sign * p[1]);
      c2_ = std::max(p[0] + p[1], p[0] + sign * p[1]);
    }
    symmetric_ = std::fmod(p[2], 2.0) == 0.0 || p[1] == 0.0;
  } else if (f == "radial") {
    need(3);
    if (!(p[2] > 0.0)) throw InvalidArgument("radial scale must be positive");
    c1_ = p[0] + std::min(0.0, p[1]);
    c2_ = p[0] + std::max(0.0, p[1]);
  } else if (f == "skew") {
    need(3);
    if (!(p[2] > 0.0)) throw InvalidArgument("skew scale must be positive");
    c1_ = p[0] - std::abs(p[1]);
    c2_ = p[0] + std::abs(p[1]);
    symmetric_ = p[1] == 0.0;
  } else {
    throw InvalidArgument("unknown density family '" + f + "'");
  }
  if (!(c1_ > 0.0)) throw InvalidArgument("density must be bounded below by a positive constant");
}

double DensityFunction::angular(std::span<const double> theta) const {
  const auto& p = spec_.params;
  if (spec_.family == "constant") return p[0];
  if (spec_.family != "angular") return p[0];
  const double phi = dim_ == 1 ? (theta[0] > 0.0 ? 0.0 : kPi) : std::atan2(theta[1], theta[0]);
  return p[0] + p[1] * std::cos(p[2] * phi);
}

double DensityFunction::perturbation_angle(std::span<const double> theta) const {
  if (spec_.family == "radial") return 1.0;
  if (spec_.family == "skew") return theta[0];
  return 0.0;
}

double DensityFunction::perturbation_radius(double r) const {
  const auto& p = spec_.params;
  if (spec_.family == "radial") {
    const double z = r / p[2];
    return p[1] * std::exp(-z * z);
  }
  if (spec_.family == "skew") {
    const double z = r / p[2];
    return p[1] * std::sqrt(std::numbers::e) * z * std::exp(-0.5 * z * z);
  }
  return 0.0;
}

bool DensityFunction::has_perturbation() const noexcept {
  return (spec_.family == "radial" || spec_.family == "skew") && spec_.params[1] != 0.0;
}

double DensityFunction::perturbation_extent() const noexcept {
  if (spec_.family == "radial") return 6.5 * spec_.params[2];
  if (spec_.family == "skew") return 9.5 * spec_.params[2];
  return 0.0;
}

double DensityFunction::operator()(std::span<const double> y) const {
  const double r = norm(y);
  if (r == 0.0) return spec_.params[0];
  std::array<double, 3> th{};
  for (int a = 0; a < dim_; ++a) th[a] = y[a] / r;
  std::span<const double> t(th.data(), dim_);
  return angular(t) + perturbation_angle(t) * perturbation_radius(r);
}

DensityFunction DensityFunction::reflected() const {
  DensitySpec s = spec_;
  if (s.family == "angular" && std::fmod(s.params[2], 2.0) != 0.0) s.params[1] = -s.params[1];
  if (s.family == "skew") s.params[1] = -s.params[1];
  return DensityFunction(dim_, s);
}

// ---------------------------------------------------------------------------

const char* to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::StableSpectral: return "StableSpectral";
    case MeasureKind::DensityKernel: return "DensityKernel";
    case MeasureKind::DirectSumAxes: return "DirectSumAxes";
  }
  return "unknown";
}

LevyMeasure LevyMeasure::stable(double alpha, SphericalMeasure sigma) {
  check_alpha(alpha);
  LevyMeasure m(MeasureKind::StableSpectral, alpha, sigma.dim());
  m.sigma_.push_back(std::move(sigma));
  return m;
}

LevyMeasure LevyMeasure::density(int dim, double alpha, DensitySpec spec) {
  check_alpha(alpha);
  LevyMeasure m(MeasureKind::DensityKernel, alpha, dim);
  m.density_.emplace_back(dim, std::move(spec));
  return m;
}

LevyMeasure LevyMeasure::direct_sum(double alpha, std::vector<double> axis_weights) {
  check_alpha(alpha);
  if (axis_weights.empty() || axis_weights.size() > 3) throw InvalidArgument("direct sum needs 1 to 3 axis weights");
  for (double w : axis_weights)
    if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("axis weights must be positive and finite");
  LevyMeasure m(MeasureKind::DirectSumAxes, alpha, static_cast<int>(axis_weights.size()));
  m.axes_ = std::move(axis_weights);
  return m;
}

const SphericalMeasure& LevyMeasure::sigma() const {
  if (kind_ != MeasureKind::StableSpectral) throw InvalidArgument("measure has no spherical part");
  return sigma_.front();
}

const DensityFunction& LevyMeasure::density_function() const {
  if (kind_ != MeasureKind::DensityKernel) throw InvalidArgument("measure has no density");
  return density_.front();
}

const std::vector<double>& LevyMeasure::axis_weights() const {
  if (kind_ != MeasureKind::DirectSumAxes) throw InvalidArgument("measure has no axis weights");
  return axes_;
}

bool LevyMeasure::is_symmetric() const {
  switch (kind_) {
    case MeasureKind::StableSpectral: return sigma().is_symmetric();
    case MeasureKind::DensityKernel: return density_function().is_symmetric();
    case MeasureKind::DirectSumAxes: return true;
  }
  return false;
}

bool LevyMeasure::satisfies_cancellation() const {
  if (alpha_ != 1.0) return true;
  switch (kind_) {
    case MeasureKind::StableSpectral: {
      const auto m = sigma().first_moment();
      double s = 0.0;
      for (double v : m) s += v * v;
      return std::sqrt(s) <= 1e-12 * sigma().total_mass();
    }
    case MeasureKind::DensityKernel: return density_function().is_symmetric();
    case MeasureKind::DirectSumAxes: return true;
  }
  return false;
}

LevyMeasure LevyMeasure::reflected() const {
  switch (kind_) {
    case MeasureKind::StableSpectral: return stable(alpha_, sigma().reflected());
    case MeasureKind::DensityKernel: {
      LevyMeasure m(MeasureKind::DensityKernel, alpha_, dim_);
      m.density_.push_back(density_function().reflected());
      return m;
    }
    case MeasureKind::DirectSumAxes: return *this;
  }
  return *this;
}

namespace {
SphericalMeasure axes_sigma(const std::vector<double>& w) {
  std::vector<Atom> atoms;
  const int d = static_cast<int>(w.size());
  for (int i = 0; i < d; ++i) {
    std::vector<double> e(d, 0.0);
    e[i] = 1.0;
    atoms.push_back({e, w[i]});
    e[i] = -1.0;
    atoms.push_back({e, w[i]});
  }
  return SphericalMeasure::discrete(std::move(atoms));
}
}  // namespace

SphericalMeasure LevyMeasure::lower_stable_bound() const {
  switch (kind_) {
    case MeasureKind::StableSpectral: return sigma();
    case MeasureKind::DensityKernel: return SphericalMeasure::isotropic(dim_, density_function().lower() * sphere_area(dim_));
    case MeasureKind::DirectSumAxes: return axes_sigma(axes_);
  }
  return sigma();
}

SphericalMeasure LevyMeasure::upper_stable_bound() const {
  switch (kind_) {
    case MeasureKind::StableSpectral: return sigma();
    case MeasureKind::DensityKernel: return SphericalMeasure::isotropic(dim_, density_function().upper() * sphere_area(dim_));
    case MeasureKind::DirectSumAxes: return axes_sigma(axes_);
  }
  return sigma();
}

// ---------------------------------------------------------------------------

double sphere_area(int dim) {
  switch (dim) {
    case 1: return 2.0;
    case 2: return 2.0 * kPi;
    case 3: return 4.0 * kPi;
  }
  throw InvalidArgument("dimension must be 1, 2 or 3");
}

double radial_constant(double alpha) {
  check_alpha(alpha);
  if (alpha == 1.0) return 0.5 * kPi;
  return std::tgamma(2.0 - alpha) * std::cos(0.5 * kPi * alpha) / (alpha * (1.0 - alpha));
}

double isotropic_moment(int dim, double alpha) {
  return std::tgamma(0.5 * dim) * std::tgamma(0.5 * (alpha + 1.0)) /
         (std::sqrt(kPi) * std::tgamma(0.5 * (dim + alpha)));
}

Complex half_line_symbol(double alpha, double s) {
  if (s == 0.0) return 0.0;
  const double a = std::abs(s);
  if (alpha == 1.0) return {0.5 * kPi * a, s * (std::log(a) + std::numbers::egamma - 1.0)};
  const double mag = std::pow(a, alpha);
  return {radial_constant(alpha) * mag, std::copysign(mag, s) * odd_constant(alpha)};
}

Complex symbol(const LevyMeasure& measure, std::span<const double> xi) {
  if (static_cast<int>(xi.size()) != measure.dim()) throw InvalidArgument("frequency has the wrong dimension");
  for (double v : xi)
    if (!std::isfinite(v)) throw InvalidArgument("frequency must be finite");
  if (std::all_of(xi.begin(), xi.end(), [](double v) { return v == 0.0; })) return 0.0;
  const double alpha = measure.alpha();
  Complex psi = 0.0;
  switch (measure.kind()) {
    case MeasureKind::StableSpectral: {
      const auto& sigma = measure.sigma();
      if (sigma.is_isotropic()) {
        return radial_constant(alpha) * sigma.total_mass() * isotropic_moment(measure.dim(), alpha) *
               std::pow(norm(xi), alpha);
      }
      for (const auto& atom : sigma.atoms()) psi += atom.weight * half_line_symbol(alpha, dot(xi, atom.direction));
      break;
    }
    case MeasureKind::DirectSumAxes: {
      const auto& w = measure.axis_weights();
      for (std::size_t i = 0; i < w.size(); ++i) psi += 2.0 * w[i] * radial_constant(alpha) * std::pow(std::abs(xi[i]), alpha);
      return psi;
    }
    case MeasureKind::DensityKernel: {
      const auto& a = measure.density_function();
      const auto& f = a.spec().family;
      if (f == "angular" && a.spec().params[1] != 0.0) {
        psi = angular_density_symbol(a, alpha, xi);
      } else {
        psi = a.spec().params[0] * sphere_area(measure.dim()) * radial_constant(alpha) *
              isotropic_moment(measure.dim(), alpha) * std::pow(norm(xi), alpha);
      }
      if (a.has_perturbation()) psi += perturbation_symbol(a, alpha, xi);
      break;
    }
  }
  if (measure.is_symmetric()) psi.imag(0.0);
  return psi;
}

double tail_mass(const LevyMeasure& measure, double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("tail radius must be positive");
  const double alpha = measure.alpha();
  const double stable_tail = std::pow(radius, -alpha) / alpha;
  switch (measure.kind()) {
    case MeasureKind::StableSpectral: return measure.sigma().total_mass() * stable_tail;
    case MeasureKind::DirectSumAxes: {
      const auto& w = measure.axis_weights();
      return 2.0 * std::accumulate(w.begin(), w.end(), 0.0) * stable_tail;
    }
    case MeasureKind::DensityKernel: {
      const auto& a = measure.density_function();
      const int dim = measure.dim();
      double angular_mass = a.spec().params[0] * sphere_area(dim);
      if (a.spec().family == "angular" && dim == 1) {
        const double plus[1] = {1.0}, minus[1] = {-1.0};
        angular_mass = a.angular(plus) + a.angular(minus);
      }
      double tail = angular_mass * stable_tail;
      if (a.spec().family == "radial" && a.has_perturbation()) {
        const double hi = a.perturbation_extent();
        if (radius < hi) {
          auto g = [&](double r) { return a.perturbation_radius(r) * std::pow(r, -1.0 - alpha); };
          double r = radius;
          double sum = 0.0;
          while (r < hi) {
            const double next = std::min(hi, std::max(2.0 * r, r + 0.25));
            sum += boost::math::quadrature::gauss<double, 30>::integrate(g, r, next);
            r = next;
          }
          tail += sphere_area(dim) * sum;
        }
      }
      return tail;
    }
  }
  return 0.0;
}

double nondegeneracy_constant(const SphericalMeasure& sigma, double alpha) {
  check_alpha(alpha);
  const int dim = sigma.dim();
  const double c = radial_constant(alpha);
  if (sigma.is_isotropic()) return c * sigma.total_mass() * isotropic_moment(dim, alpha);
  if (dim == 1) {
    const double e[1] = {1.0};
    return c * sigma.alpha_moment(e, alpha);
  }

  // Directions annihilating atoms are where the minimum sits for alpha <= 1.
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](std::span<const double> th) {
    const double n = norm(th);
    if (n < 1e-12) return;
    std::array<double, 3> u{};
    for (int i = 0; i < dim; ++i) u[i] = th[i] / n;
    best = std::min(best, sigma.alpha_moment(std::span<const double>(u.data(), dim), alpha));
  };
  const auto& atoms = sigma.atoms();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto& a = atoms[i].direction;
    if (dim == 2) {
      const double p[2] = {-a[1], a[0]};
      consider(p);
    } else {
      for (std::size_t j = i + 1; j < atoms.size(); ++j) {
        const auto& b = atoms[j].direction;
        const double x[3] = {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
        consider(x);
      }
      // Any vector orthogonal to a single atom.
      const double x[3] = {-a[1], a[0], 0.0};
      const double y[3] = {0.0, -a[2], a[1]};
      consider(x);
      consider(y);
    }
  }

  // Dyadic refinement of a uniform grid, tracked separately from the
  // candidates so that a good candidate cannot stall the refinement.
  const double scale = sigma.total_mass();
  double previous = std::numeric_limits<double>::infinity();
  double grid_best = previous;
  double grid_arg = 0.0;
  if (dim == 2) {
    for (int n = 64; n <= (1 << 20); n *= 2) {
      grid_best = std::numeric_limits<double>::infinity();
      for (int j = 0; j < n; ++j) {
        const double phi = kPi * j / n;  // half circle suffices
        const double t[2] = {std::cos(phi), std::sin(phi)};
        const double v = sigma.alpha_moment(t, alpha);
        if (v < grid_best) {
          grid_best = v;
          grid_arg = phi;
        }
      }
      if (std::abs(previous - grid_best) < 1e-9 * scale) break;
      previous = grid_best;
    }
    // Golden-section polish around the best grid point.
    auto f = [&](double phi) {
      const double t[2] = {std::cos(phi), std::sin(phi)};
      return sigma.alpha_moment(t, alpha);
    };
    double lo = grid_arg - kPi / 1024, hi = grid_arg + kPi / 1024;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 80; ++it) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - g * (hi - lo);
        f1 = f(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + g * (hi - lo);
        f2 = f(x2);
      }
    }
    best = std::min({best, grid_best, f1, f2});
  } else {
    for (int n = 16; n <= 512; n *= 2) {
      grid_best = std::numeric_limits<double>::infinity();
      for (int i = 0; i <= n; ++i) {
        const double u = std::cos(kPi * i / n);
        const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
        for (int j = 0; j < 2 * n; ++j) {
          const double phi = kPi * j / n;
          const double t[3] = {s * std::cos(phi), s * std::sin(phi), u};
          grid_best = std::min(grid_best, sigma.alpha_moment(t, alpha));
        }
      }
      if (std::abs(previous - grid_best) < 1e-6 * scale) break;
      previous = grid_best;
    }
    best = std::min(best, grid_best);
  }
  return c * std::max(0.0, best);
}

double symbol_upper_constant(const LevyMeasure& measure, double alpha, const std::vector<std::vector<double>>& xi_grid) {
  if (xi_grid.empty()) throw InvalidArgument("frequency grid is empty");
  double best = 0.0;
  for (const auto& xi : xi_grid) {
    const double r = norm(xi);
    if (!(r > 0.0)) throw InvalidArgument("frequency grid must exclude the origin");
    best = std::max(best, std::abs(symbol(measure, xi)) / std::pow(r, alpha));
  }
  return best;
}

SymbolBounds symbol_bounds(const LevyMeasure& measure, const std::vector<std::vector<double>>& xi_grid) {
  return {symbol_upper_constant(measure, measure.alpha(), xi_grid),
          nondegeneracy_constant(measure.lower_stable_bound(), measure.alpha())};
}

}  // namespace levylab
